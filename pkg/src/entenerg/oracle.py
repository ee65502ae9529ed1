"""Exact-diagonalisation and exact-Gaussian reference calculations.

These are deliberately built from different machinery than the closed forms
they check: truncated Fock spaces with sparse Kronecker-product Hamiltonians
for the spin-boson problem and the oscillator chain, and matrix square roots
(not eigenvectors) for Gaussian ground-state moments.

Bath convention: J(w) = 2 pi alpha w exp(-w / w_c), discretised into modes
with g_j**2 = (2/pi) J(w_j) dw_j, coupled as (sigma_z / 2) sum_j g_j (a_j + a_j^+).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .chain import ChainSpec, build_system
from .errors import ConvergenceError, TruncationWarning, ValidationError
from .qubit import TwoLevelSpec, level_splitting

__all__ = [
    "DiscreteBath",
    "TruncatedState",
    "SpinBosonResult",
    "FockOscillatorResult",
    "discretize_ohmic",
    "ohmic_spectral_density",
    "spin_boson_hamiltonian",
    "spin_boson_ground_state",
    "perturbative_excitation",
    "oscillator_bath_covariance",
    "chain_potential",
    "star_potential",
    "fock_ed_oscillator",
    "ohmic_star_couplings",
]

MAX_DIM = 2_000_000
DENSE_LIMIT = 4000
TRUNCATION_SHIFT = 0.01


@dataclass(frozen=True)
class DiscreteBath:
    frequencies: np.ndarray
    couplings: np.ndarray
    omega_c: float
    alpha: float

    def __post_init__(self):
        w = self.frequencies
        if np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise ValidationError("bath frequencies must be positive and strictly increasing")
        if np.any(self.couplings < 0):
            raise ValidationError("bath couplings must be non-negative")

    @property
    def size(self) -> int:
        return len(self.frequencies)

    def reorganization_energy(self) -> float:
        """sum_j g_j^2 / (4 w_j)."""
        return float(np.sum(self.couplings**2 / (4.0 * self.frequencies)))


@dataclass(frozen=True)
class TruncatedState:
    dimension: int
    energy: float
    vector: np.ndarray
    n_max: int
    n_modes: int
    residual: float


@dataclass(frozen=True)
class SpinBosonResult:
    state: TruncatedState
    p_plus: float
    mean_energy: float
    # reduced qubit density matrix in the (ground, excited) basis of H_s
    rho: np.ndarray


@dataclass(frozen=True)
class FockOscillatorResult:
    state: TruncatedState
    populations: np.ndarray
    q2: float
    p2: float
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    correlation: np.ndarray = field(default_factory=lambda: np.zeros(0))


def ohmic_spectral_density(w, alpha: float, omega_c: float):
    return 2.0 * math.pi * alpha * np.asarray(w) * np.exp(-np.asarray(w) / omega_c)


def discretize_ohmic(
    alpha: float,
    omega_c: float,
    m: int,
    scheme: str = "log",
    *,
    omega_min: float | None = None,
    omega_max: float | None = None,
) -> DiscreteBath:
    """Sample the ohmic spectral density into ``m`` modes (midpoint rule per bin).

    ``log`` uses geometric bins on [omega_min, omega_max] (defaults
    1e-3 omega_c and 10 omega_c) with geometric-centre frequencies;
    ``linear`` uses equal bins on [0, omega_max] with midpoint frequencies.
    """
    if m < 1:
        raise ValidationError(f"need at least one bath mode, got {m}")
    if alpha < 0 or not omega_c > 0:
        raise ValidationError("alpha must be >= 0 and omega_c > 0")
    hi = 10.0 * omega_c if omega_max is None else omega_max
    if scheme == "log":
        lo = 1e-3 * omega_c if omega_min is None else omega_min
        edges = np.geomspace(lo, hi, m + 1)
        w = np.sqrt(edges[:-1] * edges[1:])
    elif scheme == "linear":
        edges = np.linspace(0.0, hi, m + 1)
        w = 0.5 * (edges[:-1] + edges[1:])
    else:
        raise ValidationError(f"unknown discretisation scheme {scheme!r}")
    dw = np.diff(edges)
    g = np.sqrt(2.0 / math.pi * ohmic_spectral_density(w, alpha, omega_c) * dw)
    return DiscreteBath(w, g, omega_c, alpha)


def _ladder(n_max: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1, format="csr")


def _embed(op, position: int, dims: list[int]) -> sp.csr_matrix:
    out = sp.identity(1, format="csr")
    for i, d in enumerate(dims):
        out = sp.kron(out, op if i == position else sp.identity(d, format="csr"), format="csr")
    return out


def spin_boson_hamiltonian(spec: TwoLevelSpec, bath: DiscreteBath, n_max: int) -> sp.csr_matrix:
    """Sparse H = (eps/2) sz + (Delta/2) sx + (sz/2) sum g_j (a_j + a_j^+) + sum w_j a_j^+ a_j."""
    dims = [2] + [n_max + 1] * bath.size
    dim = int(np.prod(dims, dtype=np.int64))
    if dim > MAX_DIM:
        raise ValidationError(f"Hilbert space dimension {dim} exceeds the guard {MAX_DIM}")
    sz = sp.csr_matrix(np.diag([1.0, -1.0]))
    sx = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    a = _ladder(n_max)
    x = a + a.T
    num = sp.diags(np.arange(n_max + 1, dtype=float))
    h = 0.5 * spec.epsilon * _embed(sz, 0, dims) + 0.5 * spec.delta * _embed(sx, 0, dims)
    sz_full = _embed(sz, 0, dims)
    for j in range(bath.size):
        h = h + bath.frequencies[j] * _embed(num, j + 1, dims)
        if bath.couplings[j] != 0:
            h = h + 0.5 * bath.couplings[j] * (sz_full @ _embed(x, j + 1, dims))
    return h.tocsr()


def _ground_state(h, tol: float = 1e-10) -> tuple[float, np.ndarray, float]:
    dim = h.shape[0]
    if dim <= DENSE_LIMIT:
        dense = h.toarray() if sp.issparse(h) else np.asarray(h)
        lam, vec = np.linalg.eigh(dense)
        e0, v0 = float(lam[0]), vec[:, 0]
    else:
        try:
            lam, vec = spla.eigsh(h, k=1, which="SA", tol=1e-13, maxiter=20 * dim)
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceError("Lanczos ground-state solve did not converge") from exc
        e0, v0 = float(lam[0]), vec[:, 0]
    v0 = v0 / np.linalg.norm(v0)
    scale = max(abs(e0), 1.0)
    residual = float(np.linalg.norm(h @ v0 - e0 * v0) / scale)
    if residual > tol * max(1.0, float(abs(h).max())):
        raise ConvergenceError(f"ground-state residual {residual:.3e} above tolerance", residual=residual)
    return e0, v0, residual


def _qubit_eigenbasis(spec: TwoLevelSpec) -> tuple[np.ndarray, np.ndarray]:
    hs = 0.5 * np.array([[spec.epsilon, spec.delta], [spec.delta, -spec.epsilon]])
    lam, vec = np.linalg.eigh(hs)
    return lam, vec


def _spin_boson_solve(spec, bath, n_max):
    h = spin_boson_hamiltonian(spec, bath, n_max)
    e0, v0, res = _ground_state(h)
    psi = v0.reshape(2, -1)
    rho_charge = psi @ psi.conj().T
    lam, vec = _qubit_eigenbasis(spec)
    rho = vec.T @ rho_charge @ vec
    p_plus = float(np.clip(rho[1, 1].real, 0.0, 1.0))
    mean_energy = float(np.real(np.trace(rho @ np.diag(lam))))
    state = TruncatedState(h.shape[0], e0, v0, n_max, bath.size, res)
    return SpinBosonResult(state, p_plus, mean_energy, rho)


def spin_boson_ground_state(
    spec: TwoLevelSpec, bath: DiscreteBath, n_max: int, *, check_truncation: bool = False
) -> SpinBosonResult:
    """Ground state of the discretised spin-boson Hamiltonian and its reduced qubit state.

    With ``check_truncation`` the solve is repeated at ``n_max + 1`` and a
    :class:`TruncationWarning` is issued if p_plus moves by more than 1%.
    """
    level_splitting(spec)
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    result = _spin_boson_solve(spec, bath, n_max)
    if check_truncation:
        bigger = _spin_boson_solve(spec, bath, n_max + 1)
        ref = max(bigger.p_plus, 1e-300)
        if abs(bigger.p_plus - result.p_plus) > TRUNCATION_SHIFT * ref:
            warnings.warn(
                f"p_plus moved from {result.p_plus:.6g} to {bigger.p_plus:.6g} under n_max -> n_max + 1",
                TruncationWarning,
                stacklevel=2,
            )
    return result


def perturbative_excitation(spec: TwoLevelSpec, bath: DiscreteBath) -> float:
    """Second-order p_plus from the first-order perturbed ground state.

    |psi> = |-,0> - sum_j <+,1_j|V|-,0> / (Omega + w_j) |+,1_j> (+ terms that
    stay in the lower qubit level), normalised; p_plus is the weight of the
    upper-level admixture.
    """
    lam, vec = _qubit_eigenbasis(spec)
    omega = lam[1] - lam[0]
    sz = np.diag([1.0, -1.0])
    sz_e = vec.T @ sz @ vec
    up = 0.5 * bath.couplings * sz_e[1, 0]
    down = 0.5 * bath.couplings * sz_e[0, 0]
    w_up = np.sum(up**2 / (omega + bath.frequencies) ** 2)
    w_down = np.sum(down**2 / bath.frequencies**2)
    return float(w_up / (1.0 + w_up + w_down))


def chain_potential(spec: ChainSpec) -> tuple[np.ndarray, np.ndarray]:
    """(masses, stiffness) of the chain geometry in plain, not mass-weighted, coordinates."""
    n = spec.n_sites
    kh = spec.m_h * spec.omega_h**2
    k = np.zeros((n + 1, n + 1))
    k[0, 0] = spec.m * spec.omega**2
    # spring between sites i-1 and i
    for i in range(1, n + 1):
        k[i - 1, i - 1] += kh
        k[i, i] += kh
        k[i - 1, i] -= kh
        k[i, i - 1] -= kh
    if spec.boundary == "fixed_end":
        k[n, n] += kh
    masses = np.concatenate([[spec.m], np.full(n, spec.m_h)])
    return masses, k


def star_potential(m: float, omega: float, bath_frequencies, couplings) -> tuple[np.ndarray, np.ndarray]:
    """(masses, stiffness) for a system coordinate bilinearly coupled to unit-mass bath modes.

    V = m w^2 q^2 / 2 + sum_j (w_j^2 / 2)(x_j - c_j q / w_j^2)^2, which stays
    positive definite for any couplings thanks to the counter-term.
    """
    wj = np.asarray(bath_frequencies, dtype=float)
    c = np.asarray(couplings, dtype=float)
    n = len(wj)
    k = np.zeros((n + 1, n + 1))
    k[0, 0] = m * omega**2 + np.sum(c**2 / wj**2)
    k[0, 1:] = k[1:, 0] = -c
    k[np.arange(1, n + 1), np.arange(1, n + 1)] = wj**2
    return np.concatenate([[m], np.ones(n)]), k


def oscillator_bath_covariance(masses, stiffness, site: int = 0) -> tuple[float, float]:
    """Exact ground-state <q^2>, <p^2> of one coordinate of a quadratic Hamiltonian.

    For H = p^T M^{-1} p / 2 + x^T K x / 2 the ground-state covariances are
    <x x^T> = M^{-1/2} W^{-1} M^{-1/2} / 2 and <p p^T> = M^{1/2} W M^{1/2} / 2
    with W = (M^{-1/2} K M^{-1/2})^{1/2}, computed by a matrix square root.
    """
    masses = np.asarray(masses, dtype=float)
    k = np.asarray(stiffness, dtype=float)
    s = 1.0 / np.sqrt(masses)
    kw = s[:, None] * k * s[None, :]
    kw = 0.5 * (kw + kw.T)
    try:
        chol = np.linalg.cholesky(kw)
    except np.linalg.LinAlgError as exc:
        raise ValidationError("potential is not positive definite") from exc
    del chol
    w = scipy.linalg.sqrtm(kw)
    w = np.real(0.5 * (w + w.T))
    w_inv = np.linalg.inv(w)
    q2 = 0.5 * w_inv[site, site] / masses[site]
    p2 = 0.5 * w[site, site] * masses[site]
    return float(q2), float(p2)


def fock_ed_oscillator(
    spec: ChainSpec,
    n_max: int = 30,
    *,
    times=None,
    n_levels: int = 6,
    check_truncation: bool = False,
) -> FockOscillatorResult:
    """Truncated-Fock exact diagonalisation of the system oscillator plus a chain of N <= 2 sites.

    Works in mass-weighted coordinates, so the decoupled chain (m_h = 0) is
    allowed.  Each coordinate is expanded in the number basis of its own
    local oscillator: frequency omega for the system, omega_h for chain sites.  Returns the system level populations, <q^2>, <p^2> and,
    if ``times`` is given, the symmetrised energy correlation C(t) from the
    full spectral decomposition.
    """
    if spec.n_sites > 2:
        raise ValidationError("Fock ED is limited to chains of at most 2 sites")
    nsite = spec.n_sites + 1
    dims = [n_max + 1] * nsite
    dim = int(np.prod(dims))
    if dim > MAX_DIM:
        raise ValidationError(f"Hilbert space dimension {dim} exceeds the guard {MAX_DIM}")
    k = build_system(spec)
    masses = np.ones(nsite)
    freqs = np.concatenate([[spec.omega], np.full(spec.n_sites, spec.omega_h)])
    a = _ladder(n_max)
    ident = sp.identity(n_max + 1, format="csr")
    qs, ps = [], []
    for i in range(nsite):
        scale_q = 1.0 / math.sqrt(2.0 * masses[i] * freqs[i])
        scale_p = math.sqrt(masses[i] * freqs[i] / 2.0)
        qs.append(_embed(scale_q * (a + a.T), i, dims))
        ps.append(_embed(1j * scale_p * (a.T - a), i, dims))
    h = sp.csr_matrix((dim, dim), dtype=complex)
    for i in range(nsite):
        h = h + (ps[i] @ ps[i]) / (2.0 * masses[i])
        for j in range(nsite):
            if k[i, j] != 0:
                h = h + 0.5 * k[i, j] * (qs[i] @ qs[j])
    h = sp.csr_matrix(0.5 * (h + h.conj().T)).real.tocsr()
    hs = _embed(sp.diags(freqs[0] * (np.arange(n_max + 1) + 0.5)), 0, dims)

    want_dynamics = times is not None
    if want_dynamics:
        lam, vec = np.linalg.eigh(h.toarray())
        e0, v0 = float(lam[0]), vec[:, 0]
        residual = float(np.linalg.norm(h @ v0 - e0 * v0))
    else:
        e0, v0, residual = _ground_state(h)
    psi = v0.reshape(n_max + 1, -1)
    populations = np.real(np.einsum("ij,ij->i", psi, psi.conj()))
    q0 = qs[0]
    q2 = float(np.real(v0.conj() @ (q0 @ (q0 @ v0)))) / spec.m
    p0 = ps[0]
    p2 = float(np.real(v0.conj() @ (p0 @ (p0 @ v0)))) * spec.m
    state = TruncatedState(dim, e0, v0, n_max, spec.n_sites, residual)

    t_out = np.zeros(0)
    c_out = np.zeros(0)
    if want_dynamics:
        t_out = np.asarray(times, dtype=float)
        hv = hs @ v0
        mean = float(np.real(v0.conj() @ hv))
        dv = hv - mean * v0
        amp = np.abs(vec.T.conj() @ dv) ** 2
        gaps = lam - e0
        c_out = np.real(np.exp(-1j * np.multiply.outer(t_out, gaps)) @ amp)
    if check_truncation:
        smaller = fock_ed_oscillator(spec, n_max - 1, n_levels=n_levels)
        ref = max(abs(populations[1]), 1e-300)
        if abs(smaller.populations[1] - populations[1]) > TRUNCATION_SHIFT * ref:
            warnings.warn("rho_11 moved by more than 1% under n_max -> n_max - 1", TruncationWarning, stacklevel=2)
    return FockOscillatorResult(state, populations[:n_levels], q2, p2, t_out, c_out)


def ohmic_star_couplings(bath: DiscreteBath, m: float = 1.0, omega: float = 1.0) -> np.ndarray:
    """Bilinear couplings c_j for an oscillator (m, omega) in an ohmic bath.

    Reuses the frequency grid and alpha of ``bath``: the oscillator spectral
    density is (pi/2) sum_j c_j^2 / w_j delta(w - w_j) = 2 m omega alpha w e^{-w/w_c},
    so alpha is the damping rate in units of the oscillator frequency.
    """
    return np.sqrt(bath.couplings**2 * bath.frequencies * m * omega / math.pi)
