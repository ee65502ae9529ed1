"""System oscillator attached to the end of a finite harmonic chain.

Site 0 is the system oscillator (mass m, on-site frequency omega); sites
1..N are chain particles of mass m_h joined by springs of strength
m_h * omega_h**2, the first one attached to the system coordinate.  Times
are in units of 1/omega_h when omega_h = 1 (the CLI default); no rescaling
happens here.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ValidationError
from .numerics import sym_eig

__all__ = [
    "ChainSpec",
    "ModeBasis",
    "CorrelationTrace",
    "build_system",
    "normal_modes",
    "two_point_functions",
    "energy_correlation",
    "revival_metrics",
    "default_time_grid",
]

BOUNDARIES = ("free_end", "fixed_end")


@dataclass(frozen=True)
class ChainSpec:
    n_sites: int
    m: float = 1.0
    omega: float = 1.0
    m_h: float = 0.1
    omega_h: float = 1.0
    boundary: str = "free_end"

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValidationError(f"chain length must be >= 1, got {self.n_sites}")
        if not (self.m > 0 and self.omega > 0 and self.omega_h > 0):
            raise ValidationError("m, omega and omega_h must be positive")
        # m_h = 0 is admitted as the decoupled limit
        if self.m_h < 0:
            raise ValidationError(f"m_h must be >= 0, got {self.m_h}")
        if self.boundary not in BOUNDARIES:
            raise ValidationError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")

    @property
    def friction(self) -> float:
        """eta = (m_h / m) omega_h of the infinite chain."""
        return self.m_h / self.m * self.omega_h

    @property
    def coupling(self) -> float:
        """alpha = (m_h / m)(omega_h / omega)."""
        return self.m_h / self.m * self.omega_h / self.omega


@dataclass(frozen=True)
class ModeBasis:
    frequencies: np.ndarray
    # component of each normalised mass-weighted eigenvector on the system site
    system_weights: np.ndarray

    def __post_init__(self):
        if np.any(self.frequencies <= 0):
            raise ValidationError("mode frequencies must be positive")


@dataclass(frozen=True)
class CorrelationTrace:
    times: np.ndarray
    values: np.ndarray

    @property
    def initial(self) -> float:
        return float(self.values[0])


def build_system(spec: ChainSpec) -> np.ndarray:
    """Mass-weighted stiffness matrix M^{-1/2} K M^{-1/2} of size N + 1."""
    n = spec.n_sites
    wh2 = spec.omega_h**2
    mu = spec.m_h / spec.m
    k = np.zeros((n + 1, n + 1))
    k[0, 0] = spec.omega**2 + mu * wh2
    k[0, 1] = k[1, 0] = -math.sqrt(mu) * wh2
    idx = np.arange(1, n + 1)
    k[idx, idx] = 2.0 * wh2
    if spec.boundary == "free_end":
        k[n, n] = wh2
    if n > 1:
        k[idx[:-1], idx[1:]] = -wh2
        k[idx[1:], idx[:-1]] = -wh2
    return k


def normal_modes(k) -> ModeBasis:
    eig = sym_eig(k)
    lam = eig.eigenvalues
    if lam[0] <= 0:
        raise ConvergenceError(f"stiffness matrix is not positive definite (min eigenvalue {lam[0]:.3e})")
    return ModeBasis(np.sqrt(lam), eig.eigenvectors[0].copy())


def two_point_functions(modes: ModeBasis, spec: ChainSpec, t):
    """Ground-state correlators <A(t) B(0)> of the system coordinate and momentum.

    Returns ``(g_qq, g_pp, g_qp, g_pq)``; arrays if ``t`` is an array.
    """
    t = np.asarray(t, dtype=float)
    w = modes.frequencies
    v2 = modes.system_weights**2
    phase = np.exp(-1j * np.multiply.outer(t, w))
    g_qq = phase @ (v2 / (2.0 * w)) / spec.m
    g_pp = spec.m * (phase @ (v2 * w / 2.0))
    g_qp = 0.5j * (phase @ v2)
    g_pq = -g_qp
    return g_qq, g_pp, g_qp, g_pq


def _correlation_block(modes, spec, t):
    g_qq, g_pp, g_qp, g_pq = two_point_functions(modes, spec, t)
    kin = 1.0 / (2.0 * spec.m)
    pot = 0.5 * spec.m * spec.omega**2
    # Wick contraction of the two quadratic forms; symmetrisation = real part
    c = 2.0 * (kin * kin * g_pp**2 + pot * pot * g_qq**2 + kin * pot * (g_qp**2 + g_pq**2))
    return np.real(c)


def energy_correlation(spec: ChainSpec, t_grid=None, *, modes: ModeBasis | None = None, jobs: int = 1) -> CorrelationTrace:
    """Symmetrised ground-state energy-energy correlation C(t) of the system oscillator."""
    if modes is None:
        modes = normal_modes(build_system(spec))
    t = default_time_grid(spec) if t_grid is None else np.asarray(t_grid, dtype=float)
    # bounded memory: the phase matrix is len(t) x (N + 1)
    chunks = np.array_split(t, max(1, int(math.ceil(t.size * modes.frequencies.size / 2_000_000))))
    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(lambda c: _correlation_block(modes, spec, c), chunks))
    else:
        parts = [_correlation_block(modes, spec, c) for c in chunks]
    return CorrelationTrace(t, np.concatenate(parts))


def default_time_grid(spec: ChainSpec, points: int = 2048) -> np.ndarray:
    return np.linspace(0.0, 3.0 * spec.n_sites / spec.omega_h, points)


def revival_metrics(trace: CorrelationTrace, spec: ChainSpec) -> tuple[float, float]:
    """Time and relative height of the largest |C| in the round-trip window [N, 3N] / omega_h."""
    lo = spec.n_sites / spec.omega_h
    hi = 3.0 * spec.n_sites / spec.omega_h
    sel = (trace.times >= lo) & (trace.times <= hi)
    if not np.any(sel):
        raise ValidationError(f"time grid has no points in the revival window [{lo}, {hi}]")
    idx = np.flatnonzero(sel)
    i = idx[np.argmax(np.abs(trace.values[idx]))]
    return float(trace.times[i]), float(abs(trace.values[i]) / trace.values[0])
