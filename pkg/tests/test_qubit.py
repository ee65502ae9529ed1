import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entenerg import qubit
from entenerg.errors import ValidationError
from entenerg.qubit import TwoLevelSpec


@pytest.mark.parametrize("eps, delta, omega", [(0, 1, 1), (3, 4, 5), (1, 1, math.sqrt(2))])
def test_level_splitting(eps, delta, omega):
    assert qubit.level_splitting(TwoLevelSpec(eps, delta)) == pytest.approx(omega, rel=1e-15)


def test_degenerate_spec_rejected():
    with pytest.raises(ValidationError):
        qubit.level_splitting(TwoLevelSpec(0, 0))


def test_gibbs_limits_and_value():
    assert qubit.gibbs_probabilities(1.0, 0.0) == (0.0, 1.0)
    assert qubit.gibbs_probabilities(1.0, math.inf) == (0.5, 0.5)
    p_plus, p_minus = qubit.gibbs_probabilities(1.0, 1.0)
    assert p_plus == pytest.approx(1 / (1 + math.e), rel=1e-14)
    assert p_plus + p_minus == pytest.approx(1.0, abs=1e-15)


def test_gibbs_overflow_safe():
    assert qubit.gibbs_probabilities(1.0, 1e-300)[0] == 0.0


def test_gibbs_monotone_in_temperature():
    temps = np.geomspace(0.01, 100, 200)
    p = [qubit.gibbs_probabilities(1.0, t)[0] for t in temps]
    assert np.all(np.diff(p) > 0)


@pytest.mark.parametrize(
    "alpha, ratio, expected",
    [(0.0, 10.0, 0.0), (0.01, 100.0, 0.01 * math.log(100)), (0.02, 10.0, 0.02 * math.log(10))],
)
def test_weak_coupling_excitation(alpha, ratio, expected):
    res = qubit.weak_coupling_excitation(TwoLevelSpec(0, 1, alpha, ratio))
    assert res.p_plus == pytest.approx(expected, abs=1e-15)
    assert res.reliable


def test_weak_coupling_flag_and_guards():
    assert not qubit.weak_coupling_excitation(TwoLevelSpec(0, 1, 0.05, 100.0)).reliable
    with pytest.raises(ValidationError):
        qubit.weak_coupling_excitation(TwoLevelSpec(0, 1, 0.2, 100.0))
    with pytest.raises(ValidationError):
        qubit.weak_coupling_excitation(TwoLevelSpec(0, 1, 0.01, 0.5))


def test_energy_moments_examples():
    assert qubit.energy_moments(0.0, 1.0) == (-0.5, 0.0)
    assert qubit.energy_moments(0.5, 1.0) == (0.0, 0.25)
    spec = TwoLevelSpec(0, 2, 0.001, 200.0)
    p = qubit.weak_coupling_excitation(spec).p_plus
    _, var = qubit.energy_moments(p, spec.omega)
    lead = spec.alpha * spec.omega**2 * math.log(spec.omega_c / spec.omega)
    assert abs(var - lead) < 2 * lead * p


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0.1, 10))
def test_variance_bounded_and_round_trip(p, omega):
    mean, var = qubit.energy_moments(p, omega)
    assert var == pytest.approx(omega**2 * p * (1 - p), abs=1e-14 * omega**2)
    assert var <= omega**2 / 4 * (1 + 1e-15)
    assert qubit.energy_distribution(mean, omega).weights[1] == pytest.approx(p, abs=1e-12)


@pytest.mark.parametrize("mean, p_plus", [(-0.5, 0.0), (0.0, 0.5), (-0.4, 0.1)])
def test_energy_distribution(mean, p_plus):
    d = qubit.energy_distribution(mean, 1.0)
    assert d.values == (-0.5, 0.5)
    assert d.weights[1] == pytest.approx(p_plus, abs=1e-15)
    assert sum(d.weights) == pytest.approx(1.0, abs=1e-15)


def test_energy_distribution_rejects_unphysical_mean():
    with pytest.raises(ValidationError):
        qubit.energy_distribution(0.6, 1.0)


def test_printed_form_fails_separable_limit():
    _, printed = qubit.printed_energy_distribution(-0.5, 1.0)
    assert printed != pytest.approx(0.0)


def _spec_with_log(target):
    # alpha * ln(omega_c / Omega) = target with omega_c / Omega = 100
    return TwoLevelSpec(0, 1, target / math.log(100.0), 100.0)


@pytest.mark.parametrize("target, t_star", [(math.exp(-1), 1.0), (0.1, 1 / math.log(10))])
def test_crossover_temperature(target, t_star):
    spec = _spec_with_log(target)
    t = qubit.crossover_temperature(spec)
    assert t == pytest.approx(t_star, rel=1e-12)
    assert math.exp(-1 / t) == pytest.approx(target, rel=1e-12)


def test_crossover_rejects_pole():
    with pytest.raises(ValidationError):
        # omega_c / Omega = e makes the log exactly 1
        qubit.crossover_temperature(TwoLevelSpec(0, 1, 1.0, math.e))
    with pytest.raises(ValidationError):
        qubit.crossover_temperature(TwoLevelSpec(0, 1, 0.0, 100.0))


def test_density_matrix_examples():
    rho = qubit.weak_coupling_density_matrix(0.0, 1.0)
    assert rho.purity == pytest.approx(1.0)
    rho = qubit.weak_coupling_density_matrix(0.01, 1.0, 0.0)
    np.testing.assert_allclose(sorted(rho.eigenvalues), [0.01, 0.99], atol=1e-15)
    assert rho.purity == pytest.approx(0.9802, abs=1e-14)
    alpha, p, c = 0.01, 1.0, 0.5
    rho = qubit.weak_coupling_density_matrix(alpha, p, c)
    assert abs(rho.purity - (1 - 2 * alpha * p)) <= 2 * alpha**2 * (p**2 + 2 * abs(c) ** 2)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.05), st.floats(0, 1), st.floats(0, 1))
def test_density_matrix_eigenvalue_first_order(alpha, p, c):
    rho = qubit.weak_coupling_density_matrix(alpha, p, c)
    lam_small = min(rho.eigenvalues)
    assert abs(lam_small - alpha * p) <= 2 * alpha**2 * (p**2 + c**2) + 1e-15
    assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-12)


def test_density_matrix_flags_non_positive():
    assert not qubit.weak_coupling_density_matrix(0.5, 0.1, 1.0).positive
