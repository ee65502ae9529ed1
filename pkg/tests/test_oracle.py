import math
import warnings

import numpy as np
import pytest

from entenerg import chain, oracle, oscillator
from entenerg.chain import ChainSpec
from entenerg.errors import TruncationWarning, ValidationError
from entenerg.qubit import TwoLevelSpec


def test_discretize_zero_coupling():
    bath = oracle.discretize_ohmic(0.0, 50.0, 8)
    assert np.all(bath.couplings == 0)
    assert np.all(np.diff(bath.frequencies) > 0)


def test_discretize_log_reorganization_energy():
    alpha, wc = 0.05, 50.0
    bath = oracle.discretize_ohmic(alpha, wc, 64, "log")
    # continuum: int J/(2 pi w) dw / 2 = alpha * omega_c / 2 ... in the g^2/(4w) normalisation
    continuum = alpha * wc
    assert bath.reorganization_energy() == pytest.approx(continuum, rel=0.02)


def test_discretize_linear_converges():
    alpha, wc = 0.05, 10.0
    errs = []
    for m in (32, 64, 128):
        bath = oracle.discretize_ohmic(alpha, wc, m, "linear")
        exact = alpha * wc * (1 - math.exp(-10) * 11)
        errs.append(abs(bath.reorganization_energy() - exact))
    assert errs[1] < errs[0] / 2 and errs[2] < errs[1] / 2


def test_discretize_rejects_bad_input():
    with pytest.raises(ValidationError):
        oracle.discretize_ohmic(0.1, 10.0, 0)
    with pytest.raises(ValidationError):
        oracle.discretize_ohmic(0.1, 10.0, 4, "cubic")


def test_spin_boson_separable_at_zero_coupling():
    spec = TwoLevelSpec(0.3, 1.0, 0.0, 50.0)
    res = oracle.spin_boson_ground_state(spec, oracle.discretize_ohmic(0.0, 50.0, 3), 3)
    assert res.p_plus == pytest.approx(0.0, abs=1e-12)
    assert res.mean_energy == pytest.approx(-spec.omega / 2, abs=1e-12)
    assert res.state.energy == pytest.approx(-spec.omega / 2, abs=1e-12)


def test_spin_boson_density_matrix_is_physical():
    spec = TwoLevelSpec(0.4, 1.0, 0.02, 50.0)
    res = oracle.spin_boson_ground_state(spec, oracle.discretize_ohmic(0.02, 50.0, 3), 5)
    rho = res.rho
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-14)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(rho).min() >= -1e-12
    assert np.linalg.norm(res.state.vector) == pytest.approx(1.0, abs=1e-12)


def test_spin_boson_variational_in_truncation():
    spec = TwoLevelSpec(0.0, 1.0, 0.05, 20.0)
    bath = oracle.discretize_ohmic(0.05, 20.0, 3)
    energies = [oracle.spin_boson_ground_state(spec, bath, n).state.energy for n in (2, 3, 4, 6)]
    assert np.all(np.diff(energies) <= 1e-12)


def test_spin_boson_matches_perturbation_theory():
    spec = TwoLevelSpec(0.0, 1.0, 0.01, 50.0)
    bath = oracle.discretize_ohmic(0.01, 50.0, 4)
    ed = oracle.spin_boson_ground_state(spec, bath, 6).p_plus
    assert ed == pytest.approx(oracle.perturbative_excitation(spec, bath), rel=0.1)


def test_spin_boson_truncation_warning():
    spec = TwoLevelSpec(0.0, 1.0, 0.3, 20.0)
    bath = oracle.discretize_ohmic(0.3, 20.0, 2)
    with pytest.warns(TruncationWarning):
        oracle.spin_boson_ground_state(spec, bath, 1, check_truncation=True)


def test_dimension_guard():
    spec = TwoLevelSpec(0.0, 1.0, 0.01, 50.0)
    with pytest.raises(ValidationError):
        oracle.spin_boson_ground_state(spec, oracle.discretize_ohmic(0.01, 50.0, 12), 6)


def test_covariance_zero_coupling():
    q2, p2 = oracle.oscillator_bath_covariance(*oracle.star_potential(2.0, 1.5, [1.0, 2.0], [0.0, 0.0]))
    assert q2 == pytest.approx(1 / (2 * 2.0 * 1.5), rel=1e-12)
    assert p2 == pytest.approx(2.0 * 1.5 / 2, rel=1e-12)


@pytest.mark.parametrize("boundary", ["free_end", "fixed_end"])
def test_covariance_matches_chain_modes(boundary):
    spec = ChainSpec(25, m=1.4, omega=0.8, m_h=0.3, omega_h=1.2, boundary=boundary)
    q2, p2 = oracle.oscillator_bath_covariance(*oracle.chain_potential(spec))
    modes = chain.normal_modes(chain.build_system(spec))
    g_qq, g_pp, _, _ = chain.two_point_functions(modes, spec, 0.0)
    assert q2 == pytest.approx(g_qq.real, rel=1e-12)
    assert p2 == pytest.approx(g_pp.real, rel=1e-12)


def test_star_geometry_feeds_oscillator_module():
    bath = oracle.discretize_ohmic(0.05, 10.0, 64)
    c = oracle.ohmic_star_couplings(bath)
    q2, p2 = oracle.oscillator_bath_covariance(*oracle.star_potential(1.0, 1.0, bath.frequencies, c))
    shape = oscillator.shape_from_state(oscillator.GaussianOscState(q2, p2))
    assert shape.x < 1 < shape.y
    assert oscillator.level_populations(shape).populations[0] < 1


def test_fock_oscillator_zero_coupling():
    res = oracle.fock_ed_oscillator(ChainSpec(1, m_h=0.0), 6)
    assert res.populations[0] == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n_sites", [1, 2])
def test_fock_oscillator_matches_gaussian(n_sites):
    spec = ChainSpec(n_sites, m_h=0.05)
    t = np.linspace(0, 10, 41)
    res = oracle.fock_ed_oscillator(spec, 12 if n_sites == 2 else 30, times=t)
    wick = chain.energy_correlation(spec, t).values
    assert np.abs(res.correlation - wick).max() < 0.01 * np.abs(wick).max()
    shape = oscillator.shape_from_state(oscillator.GaussianOscState(res.q2, res.p2))
    closed = oscillator.level_populations(shape, 3).populations
    assert res.populations[1] == pytest.approx(closed[1], rel=0.01)
    assert res.populations[1] == pytest.approx(math.sqrt(4 / shape.d) * shape.b, rel=0.02)


def test_fock_oscillator_rejects_long_chain():
    with pytest.raises(ValidationError):
        oracle.fock_ed_oscillator(ChainSpec(3, m_h=0.05), 4)


def test_fock_oscillator_truncation_check_quiet_when_converged():
    with warnings.catch_warnings():
        warnings.simplefilter("error", TruncationWarning)
        oracle.fock_ed_oscillator(ChainSpec(1, m_h=0.05), 20, check_truncation=True)
