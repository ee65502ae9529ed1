"""Flux-tunable two-level systems: a ring with an in-line dot and the split
Cooper pair box.

Flux is measured in units of the flux quantum throughout, so ``flux = 0.25``
means Phi = Phi_0 / 4 and derivatives are taken with respect to Phi / Phi_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ValidationError
from .numerics import integrate_periodic
from .qubit import TwoPointDistribution

__all__ = [
    "RingSpec",
    "CpbSpec",
    "CpbParameters",
    "HarmonicSeries",
    "tunnel_coupling",
    "tunnel_coupling_derivative",
    "current_amplitude",
    "current_distribution",
    "bethe_current",
    "fourier_harmonics",
    "pilgram_ratio",
    "ansatz_exponent",
    "cpb_effective_spec",
]

MAX_HARMONIC = 12


@dataclass(frozen=True)
class RingSpec:
    t_left: float = 1.0
    t_right: float = 1.0
    # sign of the interference term; depends on the electron number parity
    parity_sign: int = -1
    epsilon: float = 0.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.t_left < 0 or self.t_right < 0 or self.t_left + self.t_right <= 0:
            raise ValidationError("tunnel energies must be >= 0 with t_left + t_right > 0")
        if self.parity_sign not in (1, -1):
            raise ValidationError(f"parity_sign must be +1 or -1, got {self.parity_sign}")
        if not 0 <= self.alpha < 1:
            raise ValidationError(f"alpha must lie in [0, 1), got {self.alpha}")


@dataclass(frozen=True)
class CpbSpec:
    e_josephson: float
    e_charging: float
    n_gate: float = 0.0
    flux_x: float = 0.0

    def __post_init__(self):
        if not (self.e_josephson > 0 and self.e_charging > 0):
            raise ValidationError("E_J and E_C must be positive")


@dataclass(frozen=True)
class CpbParameters:
    epsilon: float
    delta: float
    omega: float
    current_amplitude: float


@dataclass(frozen=True)
class HarmonicSeries:
    """Fourier sine amplitudes ``amplitudes[n - 1] = I_n``."""

    alpha: float
    amplitudes: np.ndarray

    def ratio(self, n: int) -> float:
        if self.amplitudes[0] == 0:
            raise ValidationError("I_1 vanishes; ratios undefined")
        return float(self.amplitudes[n - 1] / self.amplitudes[0])

    def ratios(self) -> np.ndarray:
        return self.amplitudes / self.amplitudes[0]


def _reduced_flux(flux):
    # sin(pi Phi) and cos(pi Phi) up to the common sign (-1)^k; exact zeros at integer flux
    phi = np.asarray(flux, dtype=float)
    r = phi - np.round(phi)
    return np.sin(np.pi * r), np.cos(np.pi * r)


def _delta_squared(ring: RingSpec, flux: float) -> float:
    tl, tr = ring.t_left, ring.t_right
    return 4.0 * (tl * tl + tr * tr + ring.parity_sign * 2.0 * tl * tr * math.cos(2 * math.pi * flux))


def tunnel_coupling(ring: RingSpec, flux: float) -> float:
    """Flux-dependent tunnelling Delta(Phi) >= 0."""
    tl, tr = ring.t_left, ring.t_right
    if ring.parity_sign == -1 and tl == tr:
        # exact form; avoids cancellation near integer flux
        return 4.0 * tl * abs(float(_reduced_flux(flux)[0]))
    return math.sqrt(max(_delta_squared(ring, flux), 0.0))


def tunnel_coupling_derivative(ring: RingSpec, flux: float) -> float:
    """d Delta / d(Phi/Phi_0); undefined where Delta = 0."""
    tl, tr = ring.t_left, ring.t_right
    if ring.parity_sign == -1 and tl == tr:
        s, c = (float(v) for v in _reduced_flux(flux))
        if s == 0:
            raise ValidationError(f"Delta has a cusp at flux={flux}")
        return 4.0 * math.pi * tl * c * math.copysign(1.0, s)
    d = tunnel_coupling(ring, flux)
    if d == 0:
        raise ValidationError(f"Delta has a cusp at flux={flux}")
    # d(Delta^2)/dPhi = -16 pi s t_L t_R sin(2 pi Phi)
    d2 = -16.0 * math.pi * ring.parity_sign * tl * tr * math.sin(2 * math.pi * flux)
    return d2 / (2.0 * d)


def current_amplitude(ring: RingSpec, flux: float) -> float:
    """I_0 = (1/2) dOmega/dPhi with Omega = sqrt(epsilon^2 + Delta^2).

    The ground state (energy -Omega/2) carries -dE/dPhi = +I_0.
    """
    delta = tunnel_coupling(ring, flux)
    omega = math.hypot(ring.epsilon, delta)
    if omega == 0:
        raise ValidationError(f"Omega vanishes at flux={flux}: current undefined at the cusp")
    if delta == 0:
        # Omega is smooth here only if epsilon != 0; dOmega/dDelta = Delta/Omega = 0
        return 0.0
    return 0.5 * delta * tunnel_coupling_derivative(ring, flux) / omega


def current_distribution(mean_current: float, i0: float) -> TwoPointDistribution:
    """Two-peak current distribution at -I_0 and +I_0 with the given mean."""
    if i0 <= 0:
        raise ValidationError(f"I_0 must be positive, got {i0}")
    if abs(mean_current) > i0 * (1 + 1e-15):
        raise ValidationError(
            f"|<I>| = {abs(mean_current)} exceeds I_0 = {i0}: the bath can only suppress the current"
        )
    r = min(max(mean_current / i0, -1.0), 1.0)
    return TwoPointDistribution((-i0, i0), (0.5 * (1.0 - r), 0.5 * (1.0 + r)))


def bethe_current(flux, alpha: float, t: float = 1.0):
    """Normalised current Delta**(alpha/(1-alpha)) * dDelta/dPhi at resonance.

    Symmetric ring (t_L = t_R = t, lower sign): Delta = 4 t |sin(pi Phi)|.
    Accepts scalars or arrays.  At integer flux the alpha > 0 current is 0;
    for alpha = 0 the one-sided limits are +-4 pi t and the value returned
    there is 0 (the mean of the two).
    """
    if not 0 <= alpha < 1:
        raise ValidationError(f"alpha must lie in [0, 1), got {alpha}")
    s, c = _reduced_flux(flux)
    delta = 4.0 * t * np.abs(s)
    ddelta = 4.0 * np.pi * t * c * np.sign(s)
    power = alpha / (1.0 - alpha)
    out = ddelta if power == 0 else delta**power * ddelta
    return float(out) if np.ndim(out) == 0 else out


def fourier_harmonics(alpha: float, n_max: int = 6, t: float = 1.0) -> HarmonicSeries:
    """Sine amplitudes I_n = 2 * int_0^1 I(phi) sin(2 pi n phi) dphi of the Bethe current."""
    if not 1 <= n_max <= MAX_HARMONIC:
        raise ValidationError(f"n_max must lie in 1..{MAX_HARMONIC}, got {n_max}")
    amps = np.empty(n_max)
    for n in range(1, n_max + 1):
        amps[n - 1] = 2.0 * integrate_periodic(
            lambda p, n=n: bethe_current(p, alpha, t) * np.sin(2 * np.pi * n * p),
            endpoint_singular=True,
            rtol=1e-12,
        )
    return HarmonicSeries(alpha, amps)


def pilgram_ratio(n: int, alpha):
    """Closed-form harmonic ratio I_n / I_1.

    Numerator factors (2k alpha - (2k - 1)) for k = 1..n-1, denominator factors
    (2k alpha - (2k + 1)) for k = 2..n.  Exact when ``alpha`` is a
    :class:`~fractions.Fraction` or int.
    """
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if alpha >= 1:
        raise ValidationError(f"alpha must be < 1, got {alpha}")
    num = n
    den = 1
    for k in range(1, n):
        num *= 2 * k * alpha - (2 * k - 1)
    for k in range(2, n + 1):
        den *= 2 * k * alpha - (2 * k + 1)
    if den == 0:
        raise ValidationError(f"pilgram ratio has a pole at alpha={alpha} for n={n}")
    if isinstance(num, int) and isinstance(den, int):
        return Fraction(num, den)
    return num / den


def ansatz_exponent(n: int) -> Fraction:
    """Exponent b_n = -(1/(n-1)) d ln(I_n/I_1)/d alpha at alpha = 0, exactly."""
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    total = sum((Fraction(2 * k, 2 * k - 1) for k in range(1, n)), Fraction(0))
    total -= sum((Fraction(2 * k, 2 * k + 1) for k in range(2, n + 1)), Fraction(0))
    return total / (n - 1)


def cpb_effective_spec(cpb: CpbSpec) -> CpbParameters:
    """Map the split Cooper pair box onto (epsilon, Delta, Omega, I_0).

    epsilon = E_J cos(pi Phi_x), Delta = E_C (1/2 - N_g) and Omega/2 =
    sqrt(epsilon^2 + Delta^2); I_0 = (1/2) dOmega/dPhi_x.
    """
    c = math.cos(math.pi * cpb.flux_x)
    eps = cpb.e_josephson * c
    delta = cpb.e_charging * (0.5 - cpb.n_gate)
    half = math.hypot(eps, delta)
    omega = 2.0 * half
    if half == 0:
        i0 = 0.0
    else:
        deps = -math.pi * cpb.e_josephson * math.sin(math.pi * cpb.flux_x)
        # dOmega/dPhi = 2 * eps * deps / half
        i0 = eps * deps / half
    return CpbParameters(eps, delta, omega, i0)
