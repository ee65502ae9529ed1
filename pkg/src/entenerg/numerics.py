"""Shared numerical kernels.

Everything here works in dimensionless units (hbar = k_B = 1) and is a pure
function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConvergenceError, ValidationError

__all__ = [
    "EigenDecomposition",
    "weighted_legendre_sequence",
    "legendre_tail_ratio",
    "as_symmetric",
    "sym_eig",
    "integrate_periodic",
    "central_difference",
]


def weighted_legendre_sequence(b: float, t2: float, n_max: int) -> np.ndarray:
    """Return ``R_n = t**n * P_n(b / t)`` with ``t**2 = t2`` for n = 0..n_max.

    Uses the real three-term recurrence

        (n + 1) R_{n+1} = (2n + 1) b R_n - n t2 R_{n-1},  R_0 = 1, R_1 = b,

    which stays real when ``t2 < 0`` (where ``b / t`` would be imaginary).
    """
    if n_max < 0:
        raise ValidationError(f"n_max must be >= 0, got {n_max}")
    if not (math.isfinite(b) and math.isfinite(t2)):
        raise ValidationError(f"non-finite input b={b!r}, t2={t2!r}")
    r = np.empty(n_max + 1)
    r[0] = 1.0
    if n_max >= 1:
        r[1] = b
    for n in range(1, n_max):
        r[n + 1] = ((2 * n + 1) * b * r[n] - n * t2 * r[n - 1]) / (n + 1)
    return r


def legendre_tail_ratio(b: float, t2: float) -> float:
    """Asymptotic growth ratio |R_{n+1} / R_n| of the weighted recurrence.

    The characteristic polynomial is r**2 - 2 b r + t2; the dominant root in
    modulus governs the tail.
    """
    disc = b * b - t2
    if disc >= 0.0:
        s = math.sqrt(disc)
        return max(abs(b + s), abs(b - s))
    # complex pair, modulus sqrt(t2)
    return math.sqrt(t2)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual: float
    orthonormality_error: float


def as_symmetric(k) -> np.ndarray:
    """Validate and return a square float matrix that is exactly symmetric."""
    k = np.asarray(k, dtype=float)
    if k.ndim != 2 or k.shape[0] != k.shape[1] or k.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValidationError("matrix has non-finite entries")
    if not np.array_equal(k, k.T):
        raise ValidationError("matrix is not exactly symmetric")
    return k


def sym_eig(k, tol: float = 1e-10) -> EigenDecomposition:
    """Eigen-decomposition of a real symmetric matrix (ascending eigenvalues).

    Backed by LAPACK via :func:`numpy.linalg.eigh`; the residual and
    orthonormality contract is checked on every call and a
    :class:`ConvergenceError` is raised if it does not hold.
    """
    k = as_symmetric(k)
    lam, v = np.linalg.eigh(k)
    norm = max(np.abs(k).sum(axis=1).max(), np.finfo(float).tiny)
    residual = float(np.abs(k @ v - v * lam).max() / norm)
    ortho = float(np.abs(v.T @ v - np.eye(k.shape[0])).max())
    if residual >= tol or ortho >= tol:
        raise ConvergenceError(
            f"eigendecomposition failed its contract: residual={residual:.3e}, "
            f"orthonormality={ortho:.3e}",
            residual=residual,
        )
    return EigenDecomposition(lam, v, residual, ortho)


def _tanh_sinh_nodes(level: int, h0: float = 0.5, cutoff: float = 4.0):
    # nodes/weights on (0, 1) with step h0 / 2**level
    h = h0 / 2**level
    s = np.arange(-int(cutoff / h), int(cutoff / h) + 1) * h
    u = 0.5 * math.pi * np.sinh(s)
    with np.errstate(over="ignore"):
        x = 1.0 / (1.0 + np.exp(-2.0 * u))
        w = h * 0.25 * math.pi * np.cosh(s) / np.cosh(u) ** 2
    keep = (x > 0.0) & (x < 1.0) & (w > 0.0)
    return x[keep], w[keep]


def integrate_periodic(
    f: Callable[[np.ndarray], np.ndarray],
    n_points: int = 16,
    *,
    rtol: float = 1e-10,
    max_points: int = 2**20,
    endpoint_singular: bool = False,
) -> float:
    """Integrate a period-1 function over one period.

    The equispaced trapezoid rule is refined by doubling ``n_points`` until two
    consecutive estimates agree to ``rtol``.  The difference between the last
    two estimates is extrapolated away Richardson-style, which is harmless for
    smooth integrands (where it is already zero) and helps for algebraic ones.

    With ``endpoint_singular=True`` the integrand may be non-smooth at the
    period boundary (a jump or a fractional-power cusp at 0 == 1).  The
    trapezoid is then applied after a tanh-sinh change of variables, which
    clusters nodes at the boundary and restores fast convergence.

    ``f`` must accept a numpy array of abscissae in [0, 1).
    """
    if n_points < 1:
        raise ValidationError("n_points must be positive")
    if endpoint_singular:
        return _integrate_tanh_sinh(f, rtol=rtol)

    n = n_points
    prev = float(np.mean(f(np.arange(n) / n)))
    prev_extrap = None
    while n < max_points:
        n *= 2
        cur = float(np.mean(f(np.arange(n) / n)))
        if cur == prev:
            return cur
        extrap = cur + (cur - prev) / 3.0
        if prev_extrap is not None and abs(extrap - prev_extrap) <= rtol * max(abs(extrap), 1e-300):
            return extrap
        prev, prev_extrap = cur, extrap
    raise ConvergenceError(
        f"periodic quadrature did not converge within {max_points} points",
        residual=abs(cur - prev),
    )


def _integrate_tanh_sinh(f, rtol: float, max_level: int = 12) -> float:
    prev = None
    for level in range(max_level + 1):
        x, w = _tanh_sinh_nodes(level)
        cur = float(np.dot(w, f(x)))
        if prev is not None and abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return cur
        prev = cur
    raise ConvergenceError("tanh-sinh quadrature did not converge")


# second-order central stencils: offsets (in units of h) and weights
_STENCILS = {
    1: (np.array([-1, 1]), np.array([-0.5, 0.5])),
    2: (np.array([-1, 0, 1]), np.array([1.0, -2.0, 1.0])),
    3: (np.array([-2, -1, 1, 2]), np.array([-0.5, 1.0, -1.0, 0.5])),
    4: (np.array([-2, -1, 0, 1, 2]), np.array([1.0, -4.0, 6.0, -4.0, 1.0])),
}

_DEFAULT_STEPS = {1: 0.02, 2: 0.04, 3: 0.04, 4: 0.08}


def central_difference(
    f: Callable[[float], float],
    x0: float,
    order: int,
    step: float | None = None,
    levels: int = 4,
) -> tuple[float, float]:
    """n-th derivative of ``f`` at ``x0`` by central differences.

    The O(h**2) central stencil is evaluated at h, h/2, ..., h/2**(levels-1)
    and the results are combined in a Richardson table.  Returns
    ``(estimate, error)``, where ``error`` is the change produced by the last
    step halving.
    """
    if order not in _STENCILS:
        raise ValidationError(f"order must be in 1..4, got {order}")
    if levels < 1:
        raise ValidationError("levels must be >= 1")
    h = _DEFAULT_STEPS[order] if step is None else float(step)
    offsets, weights = _STENCILS[order]

    def stencil(hh):
        vals = np.array([f(x0 + o * hh) for o in offsets], dtype=float)
        return float(np.dot(weights, vals)) / hh**order

    table = [[stencil(h / 2**i)] for i in range(levels)]
    for i in range(1, levels):
        for j in range(1, i + 1):
            fac = 4.0**j
            table[i].append(table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (fac - 1.0))
    estimate = table[-1][-1]
    error = abs(estimate - table[-2][-1]) if levels > 1 else float("nan")
    return estimate, error
