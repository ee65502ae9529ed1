"""Gaussian-state energetics of a harmonic oscillator entangled with a bath.

Units: hbar = 1 and the level spacing ``epsilon`` equals the oscillator
frequency.  The state enters only through the dimensionless second moments

    x = 2 m omega <q^2>,    y = 2 <p^2> / (m omega),

so that the isolated ground state has x = y = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .numerics import legendre_tail_ratio, weighted_legendre_sequence

__all__ = [
    "GaussianOscState",
    "ShapeParams",
    "LevelDistribution",
    "shape_from_state",
    "purity",
    "ohmic_xy",
    "generating_function",
    "log_generating_function",
    "cumulants",
    "level_populations",
    "level_cumulants",
]


@dataclass(frozen=True)
class GaussianOscState:
    q2: float
    p2: float
    mass: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        if not (self.mass > 0 and self.omega > 0):
            raise ValidationError("mass and omega must be positive")
        if not (self.q2 > 0 and self.p2 > 0):
            raise ValidationError("second moments must be positive")
        if self.q2 * self.p2 < 0.25 * (1 - 1e-12):
            raise ValidationError(
                f"<q^2><p^2> = {self.q2 * self.p2:.6g} violates the uncertainty bound 1/4"
            )


@dataclass(frozen=True)
class ShapeParams:
    """Dimensionless shape of the Gaussian state and the derived quantities.

    Use :meth:`from_xy`; set ``physical=False`` there to skip the uncertainty
    check when exercising algebraic identities off the physical domain.
    """

    x: float
    y: float
    epsilon: float = 1.0

    @classmethod
    def from_xy(cls, x: float, y: float, epsilon: float = 1.0, *, physical: bool = True) -> "ShapeParams":
        if not (x > 0 and y > 0 and epsilon > 0):
            raise ValidationError(f"x, y, epsilon must be positive (got {x}, {y}, {epsilon})")
        if physical and x * y < 1 - 1e-12:
            raise ValidationError(f"x*y = {x * y:.6g} < 1 violates the uncertainty relation")
        return cls(float(x), float(y), float(epsilon))

    @property
    def d(self) -> float:
        return (1.0 + self.x) * (1.0 + self.y)

    @property
    def a(self) -> float:
        """Deviation from equipartition."""
        return (self.y - self.x) / self.d

    @property
    def b(self) -> float:
        """Deviation from minimum uncertainty."""
        return (self.x * self.y - 1.0) / self.d

    @property
    def mean_energy(self) -> float:
        return self.epsilon * (self.x + self.y) / 4.0

    @property
    def uncertainty(self) -> float:
        """A = <q^2><p^2> = x y / 4."""
        return self.x * self.y / 4.0


@dataclass(frozen=True)
class LevelDistribution:
    populations: np.ndarray
    # bound on the probability mass above the last level kept
    tail: float

    @property
    def n_max(self) -> int:
        return len(self.populations) - 1

    def energies(self, epsilon: float = 1.0) -> np.ndarray:
        return epsilon * (np.arange(len(self.populations)) + 0.5)


def shape_from_state(s: GaussianOscState) -> ShapeParams:
    g2 = s.mass * s.omega
    return ShapeParams.from_xy(2.0 * g2 * s.q2, 2.0 * s.p2 / g2, s.omega)


def purity(s: GaussianOscState | ShapeParams) -> float:
    """Tr rho^2 = (1/2) / sqrt(<q^2><p^2>) = 1 / sqrt(x y)."""
    if isinstance(s, GaussianOscState):
        return 0.5 / math.sqrt(s.q2 * s.p2)
    return 1.0 / math.sqrt(s.x * s.y)


def ohmic_xy(alpha: float, cutoff_ratio: float) -> tuple[float, float]:
    """Under-damped ohmic-bath moments (x, y) for coupling ``alpha`` and cutoff ratio omega_c/omega."""
    if not 0 <= alpha < 1:
        raise ValidationError(f"alpha must lie in [0, 1) (under-damped), got {alpha}")
    if not cutoff_ratio > 1:
        raise ValidationError(f"cutoff ratio must exceed 1, got {cutoff_ratio}")
    root = math.sqrt(1.0 - alpha * alpha)
    x = (1.0 - (2.0 / math.pi) * math.atan(alpha / root)) / root
    y = (1.0 - 2.0 * alpha * alpha) * x + (4.0 * alpha / math.pi) * math.log(cutoff_ratio)
    return x, y


def _braces(shape: ShapeParams, chi):
    u = shape.epsilon * np.asarray(chi, dtype=float)
    e, a = shape.mean_energy, shape.uncertainty
    return 2.0 * e * np.sinh(u) / shape.epsilon + 2.0 * a * (np.cosh(u) - 1.0) + 0.5 * (1.0 + np.cosh(u))


def generating_function(shape: ShapeParams, chi):
    """Z(chi) = <exp(-chi H_s)> for the Gaussian state."""
    br = _braces(shape, chi)
    if np.any(br <= 0):
        raise ValidationError("generating function undefined: braces are non-positive at this chi")
    z = br**-0.5
    return float(z) if np.ndim(z) == 0 else z


def log_generating_function(shape: ShapeParams, chi):
    br = _braces(shape, chi)
    if np.any(br <= 0):
        raise ValidationError("generating function undefined: braces are non-positive at this chi")
    out = -0.5 * np.log(br)
    return float(out) if np.ndim(out) == 0 else out


def cumulants(shape: ShapeParams) -> tuple[float, float, float, float]:
    """First four energy cumulants of the Gaussian state, in closed form."""
    e, a, eps2 = shape.mean_energy, shape.uncertainty, shape.epsilon**2
    k2 = 0.5 * (-0.5 * eps2 + 4.0 * e * e - 2.0 * eps2 * a)
    k3 = -0.5 * e * (-16.0 * e * e + eps2 * (1.0 + 12.0 * a))
    k4 = 48.0 * e**4 - 4.0 * eps2 * e * e * (1.0 + 12.0 * a) + eps2 * eps2 * (0.125 + 2.0 * a + 6.0 * a * a)
    return e, k2, k3, k4


def level_populations(shape: ShapeParams, n_max: int | None = None, tail_tol: float = 1e-14) -> LevelDistribution:
    """Diagonal density-matrix elements rho_nn in the oscillator eigenbasis.

    rho_nn = sqrt(4/D) (b^2 - a^2)^(n/2) P_n(b / sqrt(b^2 - a^2)), evaluated by
    the real weighted-Legendre recurrence.  If ``n_max`` is None, enough
    levels are kept for the tail bound to fall below ``tail_tol``.
    """
    a, b = shape.a, shape.b
    t2 = b * b - a * a
    ratio = legendre_tail_ratio(b, t2)
    if ratio >= 1:
        raise ValidationError(f"populations do not decay (asymptotic ratio {ratio:.6g})")
    if n_max is None:
        # levels for ratio**n to drop below tail_tol, with slack for the prefactor
        n_max = max(8, int(math.ceil(math.log(tail_tol) / math.log(max(ratio, 1e-300)))) + 16)
    r = weighted_legendre_sequence(b, t2, n_max)
    rho = math.sqrt(4.0 / shape.d) * r
    return LevelDistribution(rho, _tail_bound(rho, ratio))


def _tail_bound(rho: np.ndarray, ratio: float) -> float:
    if len(rho) < 3 or ratio == 0:
        return 0.0 if ratio == 0 else abs(rho[-1])
    # geometric continuation from the largest of the last few terms, doubled
    # when the sequence has not yet settled into monotone decay
    last = np.abs(rho[-3:])
    bound = last.max() * ratio / (1.0 - ratio)
    if not (last[2] <= last[1] <= last[0]):
        bound *= 2.0
    return float(bound)


def level_cumulants(dist: LevelDistribution, epsilon: float = 1.0, order: int = 4) -> list[float]:
    """Energy cumulants assembled from raw moments of a level distribution."""
    e = dist.energies(epsilon)
    p = dist.populations
    mu = [float(np.dot(p, e**k)) for k in range(order + 1)]
    m1 = mu[1] / mu[0]
    # central moments then cumulants
    c = [float(np.dot(p, (e - m1) ** k)) / mu[0] for k in range(order + 1)]
    out = [m1, c[2], c[3], c[4] - 3.0 * c[2] ** 2]
    return out[:order]
