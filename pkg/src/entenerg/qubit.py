"""Two-level system energetics in the global ground state.

Energies are measured with E_- = -Omega/2 and E_+ = +Omega/2 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError

__all__ = [
    "TwoLevelSpec",
    "TwoPointDistribution",
    "ReducedDensityMatrix2",
    "WeakCouplingResult",
    "level_splitting",
    "gibbs_probabilities",
    "boltzmann_excitation",
    "weak_coupling_excitation",
    "energy_moments",
    "energy_distribution",
    "printed_energy_distribution",
    "crossover_temperature",
    "weak_coupling_density_matrix",
]

WEAK_COUPLING_FLAG = 0.1
WEAK_COUPLING_GUARD = 0.5


@dataclass(frozen=True)
class TwoLevelSpec:
    """Spin-boson qubit: bias, tunnelling, ohmic coupling and bath cutoff."""

    epsilon: float
    delta: float
    alpha: float = 0.0
    omega_c: float = math.inf

    def __post_init__(self):
        if self.alpha < 0:
            raise ValidationError(f"alpha must be >= 0, got {self.alpha}")
        if not self.omega_c > 0:
            raise ValidationError(f"omega_c must be > 0, got {self.omega_c}")

    @property
    def omega(self) -> float:
        return level_splitting(self)


@dataclass(frozen=True)
class TwoPointDistribution:
    """Two delta peaks: ``values[i]`` carries probability ``weights[i]``."""

    values: tuple[float, float]
    weights: tuple[float, float]

    def __post_init__(self):
        w0, w1 = self.weights
        if w0 < 0 or w1 < 0 or abs(w0 + w1 - 1.0) > 1e-12:
            raise ValidationError(f"invalid weights {self.weights}")

    def mean(self) -> float:
        return self.values[0] * self.weights[0] + self.values[1] * self.weights[1]

    def variance(self) -> float:
        d = self.values[1] - self.values[0]
        return d * d * self.weights[0] * self.weights[1]


@dataclass(frozen=True)
class ReducedDensityMatrix2:
    """2x2 reduced density matrix in the (ground, excited) energy basis."""

    matrix: np.ndarray
    positive: bool

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    @property
    def p_plus(self) -> float:
        return float(np.real(self.matrix[1, 1]))


class WeakCouplingResult(NamedTuple):
    p_plus: float
    # False once the linearised result exceeds WEAK_COUPLING_FLAG
    reliable: bool


def level_splitting(spec: TwoLevelSpec) -> float:
    if spec.epsilon == 0 and spec.delta == 0:
        raise ValidationError("degenerate two-level system: epsilon = delta = 0")
    return math.hypot(spec.epsilon, spec.delta)


def gibbs_probabilities(omega: float, temperature: float) -> tuple[float, float]:
    """Thermal ``(p_plus, p_minus)`` of a level pair split by ``omega``.

    The T = 0 and T = inf limits are returned exactly, without evaluating the
    exponential at extreme arguments.
    """
    if not omega > 0:
        raise ValidationError(f"omega must be > 0, got {omega}")
    if temperature < 0:
        raise ValidationError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0, 1.0
    if math.isinf(temperature):
        return 0.5, 0.5
    x = omega / temperature
    if x > 700.0:
        return 0.0, 1.0
    p_plus = 1.0 / (1.0 + math.exp(x))
    return p_plus, 1.0 - p_plus


def boltzmann_excitation(omega: float, temperature: float) -> float:
    """Low-temperature occupation exp(-Omega/T) of the upper level."""
    if temperature < 0 or not omega > 0:
        raise ValidationError("need omega > 0 and temperature >= 0")
    if temperature == 0:
        return 0.0
    return math.exp(-omega / temperature)


def _log_cutoff(spec: TwoLevelSpec) -> float:
    omega = level_splitting(spec)
    if not spec.omega_c > omega:
        raise ValidationError(f"cutoff omega_c={spec.omega_c} must exceed Omega={omega}")
    return math.log(spec.omega_c / omega)


def weak_coupling_excitation(spec: TwoLevelSpec) -> WeakCouplingResult:
    """Excited-state probability ``alpha * ln(omega_c / Omega)`` for an ohmic bath."""
    p = spec.alpha * _log_cutoff(spec)
    if p > WEAK_COUPLING_GUARD:
        raise ValidationError(
            f"alpha*ln(omega_c/Omega) = {p:.4g} is outside the weak-coupling range (<= {WEAK_COUPLING_GUARD})"
        )
    return WeakCouplingResult(p, p <= WEAK_COUPLING_FLAG)


def energy_moments(p_plus: float, omega: float) -> tuple[float, float]:
    """Mean and variance of the system energy given the excitation probability."""
    if not 0.0 <= p_plus <= 1.0:
        raise ValidationError(f"p_plus must lie in [0, 1], got {p_plus}")
    half = 0.5 * omega
    mean = -half * (1.0 - p_plus) + half * p_plus
    return mean, omega * omega * p_plus * (1.0 - p_plus)


def energy_distribution(mean_energy: float, omega: float) -> TwoPointDistribution:
    """Energy distribution reconstructed from the mean energy alone.

    Uses ``p_plus = (1 + 2<E>/Omega) / 2``, which is what solving
    ``<E> = -Omega/2 p_- + Omega/2 p_+`` gives.
    """
    half = 0.5 * omega
    if abs(mean_energy) > half * (1 + 1e-15):
        raise ValidationError(f"|<E>| = {abs(mean_energy)} exceeds Omega/2 = {half}")
    p_plus = min(max(0.5 * (1.0 + mean_energy / half), 0.0), 1.0)
    return TwoPointDistribution((-half, half), (1.0 - p_plus, p_plus))


def printed_energy_distribution(mean_energy: float, omega: float) -> tuple[float, float]:
    """``(p_minus, p_plus)`` with the coefficient <E>/(2 Omega) taken literally.

    Kept for documentation only: it does not reduce to a single peak at
    <E> = -Omega/2.  Use :func:`energy_distribution`.
    """
    p_plus = 0.5 * (1.0 + mean_energy / (2.0 * omega))
    return 1.0 - p_plus, p_plus


def crossover_temperature(spec: TwoLevelSpec) -> float:
    """Temperature at which exp(-Omega/T) equals the entanglement-induced p_plus."""
    omega = level_splitting(spec)
    p = spec.alpha * _log_cutoff(spec)
    if not 0.0 < p < 1.0:
        raise ValidationError(f"no crossover: alpha*ln(omega_c/Omega) = {p:.4g} not in (0, 1)")
    return -omega / math.log(p)


def weak_coupling_density_matrix(alpha: float, p: float, c: complex = 0.0) -> ReducedDensityMatrix2:
    """First-order reduced density matrix diag(1 - alpha p, alpha p) + alpha c coherences."""
    if p < 0 or alpha < 0:
        raise ValidationError("alpha and p must be non-negative")
    if alpha * p > 1:
        raise ValidationError(f"alpha*p = {alpha * p} exceeds 1")
    c = complex(c)
    rho = np.array(
        [[1.0 - alpha * p, alpha * c], [alpha * c.conjugate(), alpha * p]], dtype=complex
    )
    positive = bool(np.linalg.eigvalsh(rho).min() >= -1e-15)
    return ReducedDensityMatrix2(rho, positive)
