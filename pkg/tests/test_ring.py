import math
from fractions import Fraction

import numpy as np
import pytest

from entenerg import ring
from entenerg.errors import ValidationError
from entenerg.ring import CpbSpec, RingSpec


@pytest.mark.parametrize(
    "spec, flux, delta",
    [
        (RingSpec(1, 1, -1), 0.0, 0.0),
        (RingSpec(1, 1, -1), 0.5, 4.0),
        (RingSpec(1, 0, -1), 0.123, 2.0),
        (RingSpec(1, 0, +1), 0.77, 2.0),
    ],
)
def test_tunnel_coupling(spec, flux, delta):
    assert ring.tunnel_coupling(spec, flux) == pytest.approx(delta, abs=1e-14)


def test_tunnel_coupling_symmetric_form():
    spec = RingSpec(1.3, 1.3, -1)
    for phi in np.linspace(0, 2, 37):
        assert ring.tunnel_coupling(spec, phi) == pytest.approx(4 * 1.3 * abs(math.sin(math.pi * phi)), abs=1e-13)


def test_current_amplitude_examples():
    assert ring.current_amplitude(RingSpec(1, 1, -1), 0.25) == pytest.approx(math.sqrt(2) * math.pi, rel=1e-13)
    assert abs(ring.current_amplitude(RingSpec(1, 1, -1), 0.5)) < 1e-12
    assert abs(ring.current_amplitude(RingSpec(1e-4, 1e-4, -1, epsilon=100.0), 0.3)) < 1e-8
    with pytest.raises(ValidationError):
        ring.current_amplitude(RingSpec(1, 1, -1), 1.0)


def test_current_amplitude_matches_derivative_of_omega():
    spec = RingSpec(0.7, 1.1, -1, epsilon=0.4)

    def omega(phi):
        return math.hypot(spec.epsilon, ring.tunnel_coupling(spec, phi))

    h = 1e-6
    for phi in (0.1, 0.33, 0.71):
        fd = (omega(phi + h) - omega(phi - h)) / (2 * h)
        assert ring.current_amplitude(spec, phi) == pytest.approx(0.5 * fd, rel=1e-7)


@pytest.mark.parametrize("mean, weights", [(1.0, (0.0, 1.0)), (0.0, (0.5, 0.5)), (0.6, (0.2, 0.8))])
def test_current_distribution(mean, weights):
    d = ring.current_distribution(mean, 1.0)
    np.testing.assert_allclose(d.weights, weights, atol=1e-15)
    assert d.mean() == pytest.approx(mean, abs=1e-14)


def test_current_distribution_rejects_enhancement():
    with pytest.raises(ValidationError):
        ring.current_distribution(1.1, 1.0)


def test_bethe_current_alpha_zero_jump():
    jump = ring.bethe_current(1e-12, 0.0) - ring.bethe_current(-1e-12, 0.0)
    assert jump == pytest.approx(8 * math.pi, rel=1e-10)


@pytest.mark.parametrize("phi", [0.0, 0.5, 1.0])
def test_bethe_current_zeros(phi):
    assert ring.bethe_current(phi, 0.2) == pytest.approx(0.0, abs=1e-12)


def test_bethe_current_antisymmetry():
    phi = np.linspace(0.001, 0.999, 501)
    for alpha in (0.0, 0.1, 0.3, 0.6):
        np.testing.assert_allclose(ring.bethe_current(1 - phi, alpha), -ring.bethe_current(phi, alpha), atol=1e-10)


def test_bethe_current_suppressed_near_zero_flux():
    for alpha in (0.05, 0.3, 0.9):
        assert abs(ring.bethe_current(1e-9, alpha)) < 4 * math.pi


@pytest.mark.xfail(
    strict=True,
    reason="with unit prefactor and t = 1, Delta reaches 4 so Delta**(alpha/(1-alpha)) amplifies the maximum",
)
def test_bethe_current_maximum_below_zero_coupling_limit():
    phi = np.linspace(0.0005, 0.9995, 2001)
    for alpha in np.linspace(0.05, 0.9, 18):
        assert np.abs(ring.bethe_current(phi, alpha)).max() < 4 * math.pi


def test_bethe_current_rejects_strong_coupling():
    with pytest.raises(ValidationError):
        ring.bethe_current(0.3, 1.0)


def test_harmonics_at_zero_coupling():
    series = ring.fourier_harmonics(0.0, 4)
    assert series.ratio(2) == pytest.approx(0.4, abs=1e-8)
    assert series.ratio(3) == pytest.approx(9 / 35, abs=1e-8)


def test_harmonics_match_product_formula():
    series = ring.fourier_harmonics(0.3, 6)
    for n in range(1, 7):
        assert series.ratio(n) == pytest.approx(ring.pilgram_ratio(n, 0.3), abs=1e-6)


def test_harmonic_ratios_decrease_with_coupling():
    alphas = np.linspace(0, 0.4, 9)
    for n in (2, 3, 4):
        vals = [abs(ring.pilgram_ratio(n, a)) for a in alphas]
        assert np.all(np.diff(vals) < 0)


def test_harmonics_cap():
    with pytest.raises(ValidationError):
        ring.fourier_harmonics(0.1, ring.MAX_HARMONIC + 1)


def test_pilgram_ratio_exact():
    assert ring.pilgram_ratio(1, Fraction(1, 3)) == 1
    assert ring.pilgram_ratio(2, 0) == Fraction(2, 5)
    assert ring.pilgram_ratio(3, 0) == Fraction(9, 35)
    with pytest.raises(ValidationError):
        ring.pilgram_ratio(2, Fraction(5, 4))
    with pytest.raises(ValidationError):
        # pole of the n = 2 denominator at alpha = 5/4 lies beyond alpha < 1, so use the k = 2 factor directly
        ring.pilgram_ratio(0, 0)


@pytest.mark.parametrize("n, b", [(2, Fraction(6, 5)), (3, Fraction(88, 105)), (4, Fraction(626, 945))])
def test_ansatz_exponent(n, b):
    assert ring.ansatz_exponent(n) == b


def test_ansatz_exponent_is_log_derivative():
    h = Fraction(1, 10**8)
    for n in (2, 3, 4):
        fd = -(math.log(abs(ring.pilgram_ratio(n, h))) - math.log(abs(ring.pilgram_ratio(n, -h)))) / (2 * float(h))
        assert fd / (n - 1) == pytest.approx(float(ring.ansatz_exponent(n)), rel=1e-7)


def test_cpb_examples():
    assert ring.cpb_effective_spec(CpbSpec(1, 4, 0.2, 0.5)).epsilon == pytest.approx(0.0, abs=1e-15)
    assert ring.cpb_effective_spec(CpbSpec(1, 4, 0.5, 0.1)).delta == 0.0
    r = ring.cpb_effective_spec(CpbSpec(1, 4, 0.25, 0.0))
    assert r.delta == pytest.approx(1.0)
    assert r.omega / 2 == pytest.approx(math.sqrt(2), rel=1e-15)


def test_cpb_current_is_half_derivative():
    def omega(fx):
        return ring.cpb_effective_spec(CpbSpec(1.2, 3.0, 0.3, fx)).omega

    h = 1e-6
    fx = 0.27
    fd = (omega(fx + h) - omega(fx - h)) / (2 * h)
    assert ring.cpb_effective_spec(CpbSpec(1.2, 3.0, 0.3, fx)).current_amplitude == pytest.approx(0.5 * fd, rel=1e-7)


def test_cpb_rejects_non_positive_energies():
    with pytest.raises(ValidationError):
        CpbSpec(0.0, 1.0)
