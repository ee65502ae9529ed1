"""Acceptance and invariant checks, runnable from the CLI (``entenerg verify``)
and from the test-suite.

Every check returns a :class:`CheckResult`; none of them raises on a failed
criterion.  Tolerances are fixed here and never tuned at run time.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import chain, oracle, oscillator, qubit, ring
from .numerics import central_difference

__all__ = ["CheckResult", "CHECKS", "run_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} ({self.seconds:.3g} s)"


def _timed(name: str, budget: float, fn: Callable[[], tuple[bool, str]]) -> CheckResult:
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if elapsed > budget:
        ok = False
        detail += f"; runtime {elapsed:.3g} s over budget {budget} s"
    return CheckResult(name, ok, detail, elapsed)


def check_ansatz_exponents() -> CheckResult:
    expected = {2: Fraction(6, 5), 3: Fraction(88, 105), 4: Fraction(626, 945)}

    def body():
        got = {n: ring.ansatz_exponent(n) for n in expected}
        return got == expected, ", ".join(f"b_{n}={v}" for n, v in got.items())

    return _timed("1 ansatz exponents", 1e-3, body)


def check_harmonic_ratios() -> CheckResult:
    def body():
        worst = 0.0
        for alpha in (0.0, 0.1, 0.2, 0.3, 0.4):
            series = ring.fourier_harmonics(alpha, 6)
            for n in range(1, 7):
                worst = max(worst, abs(series.ratio(n) - float(ring.pilgram_ratio(n, alpha))))
        r2 = ring.fourier_harmonics(0.0, 2).ratio(2)
        ok = worst < 1e-6 and abs(r2 - 0.4) < 1e-8
        return ok, f"max |quadrature - product| = {worst:.2e}, I2/I1(0) = {r2:.12f}"

    return _timed("2 harmonic ratio cross-oracle", 1.0, body)


def check_discontinuity() -> CheckResult:
    def body():
        eps = 1e-12
        jump = ring.bethe_current(eps, 0.0) - ring.bethe_current(-eps, 0.0)
        ok = abs(jump - 8 * math.pi) < 1e-9 * 8 * math.pi
        parts = [f"alpha=0 jump {jump:.10f} (8 pi = {8 * math.pi:.10f})"]
        for alpha in (0.05, 0.1, 0.2, 0.3):
            at_zero = ring.bethe_current(0.0, alpha)
            side = max(abs(ring.bethe_current(1e-6, alpha)), abs(ring.bethe_current(-1e-6, alpha)))
            rel = side / jump
            ok = ok and at_zero == 0.0 and rel < 1e-3
            parts.append(f"alpha={alpha}: I(0)={at_zero}, |I(+-1e-6)|/jump={rel:.3g}")
        return ok, "; ".join(parts)

    return _timed("3 discontinuity suppression", 1.0, body)


def check_oscillator_identities() -> CheckResult:
    def body():
        grid = np.linspace(0.2, 5.0, 20)
        worst = dict(norm=0.0, mean=0.0, z=0.0, levels=0.0, fd=0.0)
        for x in grid:
            for y in grid:
                shape = oscillator.ShapeParams.from_xy(x, y, physical=False)
                dist = oscillator.level_populations(shape)
                p = dist.populations
                n = np.arange(p.size) + 0.5
                worst["norm"] = max(worst["norm"], abs(p.sum() - 1.0) - dist.tail)
                worst["mean"] = max(worst["mean"], abs(p @ n - (x + y) / 4.0))
                for u in (0.1, 1.0, 5.0):
                    worst["z"] = max(worst["z"], abs(oscillator.generating_function(shape, u) - p @ np.exp(-u * n)))
                closed = oscillator.cumulants(shape)
                from_levels = oscillator.level_cumulants(dist)
                for order, k in enumerate(closed, start=1):
                    scale = max(1.0, abs(k))
                    worst["levels"] = max(worst["levels"], abs(from_levels[order - 1] - k) / scale)
                    d, _ = central_difference(lambda c: oscillator.log_generating_function(shape, c), 0.0, order)
                    worst["fd"] = max(worst["fd"], abs((-1) ** order * d - k) / scale)
        ok = (
            worst["norm"] <= 1e-12
            and worst["mean"] <= 1e-10
            and worst["z"] <= 1e-10
            and worst["levels"] <= 1e-8
            and worst["fd"] <= 1e-6
        )
        return ok, ", ".join(f"{k}={v:.2e}" for k, v in worst.items())

    return _timed("4 oscillator identity suite", 10.0, body)


def _weak_kappa2(alpha, ratio):
    x, y = oscillator.ohmic_xy(alpha, ratio)
    return oscillator.cumulants(oscillator.ShapeParams.from_xy(x, y))[1]


def check_log_scaling() -> CheckResult:
    def body():
        logs = np.log([1e2, 1e3, 1e4])
        slopes = []
        doubling = 0.0
        for alpha in (1e-3, 2e-3):
            vals = np.array([_weak_kappa2(alpha, math.exp(L)) / alpha for L in logs])
            slopes.extend(np.diff(vals) / np.diff(logs))
        for L in logs:
            r = _weak_kappa2(2e-3, math.exp(L)) / _weak_kappa2(1e-3, math.exp(L))
            doubling = max(doubling, abs(r / 2.0 - 1.0))
        spread = max(slopes) / min(slopes) - 1.0
        ok = spread < 0.05 and doubling < 0.01
        return ok, f"slopes {', '.join(f'{s:.5f}' for s in slopes)} (spread {spread:.2%}), doubling error {doubling:.2%}"

    return _timed("5 weak-coupling log scaling", 1.0, body)


def random_chain_specs(count: int = 20, seed: int = 20240601, n_max: int = 200):
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(count):
        specs.append(
            chain.ChainSpec(
                n_sites=int(rng.integers(1, n_max + 1)),
                m=float(rng.uniform(0.5, 2.0)),
                omega=float(rng.uniform(0.3, 3.0)),
                m_h=float(rng.uniform(0.01, 1.0)),
                omega_h=float(rng.uniform(0.3, 3.0)),
                boundary=str(rng.choice(chain.BOUNDARIES)),
            )
        )
    return specs


def wick_mismatch(spec: chain.ChainSpec) -> float:
    modes = chain.normal_modes(chain.build_system(spec))
    g_qq, g_pp, _, _ = chain.two_point_functions(modes, spec, 0.0)
    c0 = chain.energy_correlation(spec, [0.0], modes=modes).values[0]
    state = oscillator.GaussianOscState(float(g_qq.real), float(g_pp.real), spec.m, spec.omega)
    k2 = oscillator.cumulants(oscillator.shape_from_state(state))[1]
    return abs(c0 - k2) / abs(k2)


def check_wick_identity() -> CheckResult:
    def body():
        worst = max(wick_mismatch(s) for s in random_chain_specs())
        return worst < 1e-10, f"max relative |C(0) - kappa_2| = {worst:.2e} over 20 specs"

    return _timed("6 chain Wick identity", 30.0, body)


def check_revivals() -> CheckResult:
    def body():
        ok = True
        parts = []
        times = {}
        for n in (50, 100, 200):
            spec = chain.ChainSpec(n_sites=n, m=1.0, omega=1.0, m_h=0.1, omega_h=1.0)
            trace = chain.energy_correlation(spec)
            t, c = trace.times, trace.values
            early = (t >= 10.0) & (t <= n)
            decays = np.abs(c[early]).max() < 0.25 * c[0]
            crossings = int(np.sum(np.diff(np.sign(c[t <= n])) != 0))
            t_rev, ratio = chain.revival_metrics(trace, spec)
            frac = t_rev / (2.0 * n)
            times[n] = t_rev
            good = decays and crossings >= 4 and 0.75 <= frac <= 1.25 and 0 < ratio < 1
            ok = ok and good
            parts.append(f"N={n}: t_rev/(2N)={frac:.3f}, peak_ratio={ratio:.3f}, decays={decays}, sign changes={crossings}")
        scaling = times[100] / times[50]
        ok = ok and abs(scaling - 2.0) <= 0.3
        parts.append(f"t_rev(100)/t_rev(50)={scaling:.3f}")
        return ok, "; ".join(parts)

    return _timed("7 chain revival phenomenology", 120.0, body)


def check_oracles() -> CheckResult:
    def body():
        parts = []
        # (a) spin-boson ED vs perturbation theory
        alphas = (0.0025, 0.005, 0.01, 0.02)
        ed, worst = [], 0.0
        for alpha in alphas:
            spec = qubit.TwoLevelSpec(0.0, 1.0, alpha, 50.0)
            bath = oracle.discretize_ohmic(alpha, 50.0, 4, "log")
            p_ed = oracle.spin_boson_ground_state(spec, bath, 6).p_plus
            p_pt = oracle.perturbative_excitation(spec, bath)
            ed.append(p_ed)
            worst = max(worst, abs(p_ed - p_pt) / p_pt)
        increasing = all(b > a for a, b in zip(ed, ed[1:]))
        ok_a = worst < 0.10 and increasing
        parts.append(f"(a) max |ED-PT|/PT={worst:.3%}, increasing={increasing}")
        # (b) Fock ED vs Wick C(t) on the N = 1 chain
        spec = chain.ChainSpec(n_sites=1, m=1.0, omega=1.0, m_h=0.05, omega_h=1.0)
        t = np.linspace(0.0, 10.0, 401)
        fock = oracle.fock_ed_oscillator(spec, 30, times=t)
        wick = chain.energy_correlation(spec, t).values
        dev_b = np.abs(fock.correlation - wick).max() / np.abs(wick).max()
        ok_b = dev_b < 0.01
        parts.append(f"(b) max |C_ED - C_Wick|/max|C|={dev_b:.2e}")
        # (c) rho_11 against the closed form at the exact Gaussian moments
        q2, p2 = oracle.oscillator_bath_covariance(*oracle.chain_potential(spec))
        shape = oscillator.shape_from_state(oscillator.GaussianOscState(q2, p2, spec.m, spec.omega))
        closed = math.sqrt(4.0 / shape.d) * shape.b
        dev_c = abs(fock.populations[1] - closed) / closed
        ok_c = dev_c < 0.02
        parts.append(f"(c) rho_11 ED={fock.populations[1]:.6e} closed={closed:.6e} rel={dev_c:.2e}")
        return ok_a and ok_b and ok_c, "; ".join(parts)

    return _timed("8 oracle agreement", 300.0, body)


def check_round_trip() -> CheckResult:
    def body():
        worst = 0.0
        for p in np.linspace(0.0, 1.0, 1001):
            mean, _ = qubit.energy_moments(p, 1.0)
            worst = max(worst, abs(qubit.energy_distribution(mean, 1.0).weights[1] - p))
        return worst <= 1e-12, f"max |p_plus round trip error| = {worst:.2e}"

    return _timed("9a qubit energy round trip", 1.0, body)


def check_crossover() -> CheckResult:
    def body():
        worst_gibbs = worst_boltzmann = 0.0
        for target in np.linspace(0.01, 0.5, 50):
            spec = qubit.TwoLevelSpec(0.0, 1.0, target / math.log(100.0), 100.0)
            p_weak = qubit.weak_coupling_excitation(spec).p_plus
            t_star = qubit.crossover_temperature(spec)
            p_gibbs, _ = qubit.gibbs_probabilities(1.0, t_star)
            worst_gibbs = max(worst_gibbs, abs(p_gibbs - p_weak))
            worst_boltzmann = max(worst_boltzmann, abs(qubit.boltzmann_excitation(1.0, t_star) - p_weak))
        ok = worst_gibbs <= 1e-10
        return ok, (
            f"max |gibbs p_plus(T*) - alpha ln(wc/W)| = {worst_gibbs:.3e}; "
            f"low-temperature form exp(-W/T*) residual = {worst_boltzmann:.1e}"
        )

    return _timed("9b qubit crossover consistency", 1.0, body)


CHECKS: dict[str, Callable[[], CheckResult]] = {
    "ansatz_exponents": check_ansatz_exponents,
    "harmonic_ratios": check_harmonic_ratios,
    "discontinuity": check_discontinuity,
    "oscillator_identities": check_oscillator_identities,
    "log_scaling": check_log_scaling,
    "wick_identity": check_wick_identity,
    "revivals": check_revivals,
    "oracles": check_oracles,
    "round_trip": check_round_trip,
    "crossover": check_crossover,
}


def run_checks(names=None, emit=print) -> list[CheckResult]:
    results = []
    for name in names or CHECKS:
        result = CHECKS[name]()
        if emit is not None:
            emit(result.line())
        results.append(result)
    return results
