"""Command-line front end.

Usage::

    entenerg SUBCOMMAND [--config FILE] [--output PATH] [--jobs N] [--KEY VALUE ...]

Every numeric parameter accepts either a single value or a linear grid
``start:stop:count``.  Gridded parameters are swept as a Cartesian product
in declaration order and become leading output columns.  Output is
comma-separated text with a header row of ``name[unit]`` columns.

Exit status: 0 success, 1 a ``verify`` check failed, 2 invalid input,
3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import chain, oracle, oscillator, qubit, ring
from .errors import ConvergenceError, EntenergError, ValidationError

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2, 3


class ConfigError(ValidationError):
    pass


@dataclass(frozen=True)
class Param:
    name: str
    default: object
    kind: type = float
    unit: str = "1"
    # only numeric parameters may carry a start:stop:count grid
    grid: bool = True


@dataclass(frozen=True)
class Subcommand:
    name: str
    help: str
    params: tuple[Param, ...]
    columns: Callable[[dict], list[str]]
    rows: Callable[[dict], list[tuple]]


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    output: str | None = None
    jobs: int = 1


def _nan_on_invalid(fn, *args):
    try:
        return fn(*args)
    except ValidationError:
        return math.nan


# ---------------------------------------------------------------- row makers


def _qubit_probs(p):
    spec = qubit.TwoLevelSpec(p["epsilon"], p["delta"], p["alpha"], p["omega_c"])
    omega = spec.omega
    weak = qubit.weak_coupling_excitation(spec)
    mean, var = qubit.energy_moments(weak.p_plus, omega)
    purity = weak.p_plus**2 + (1.0 - weak.p_plus) ** 2
    return [(weak.p_plus, 1.0 - weak.p_plus, mean, var, purity, int(weak.reliable))]


def _qubit_energy_dist(p):
    dist = qubit.energy_distribution(p["mean_energy"], p["omega"])
    _, printed = qubit.printed_energy_distribution(p["mean_energy"], p["omega"])
    return [(dist.values[0], dist.values[1], dist.weights[0], dist.weights[1], printed)]


def _qubit_crossover(p):
    spec = qubit.TwoLevelSpec(p["epsilon"], p["delta"], p["alpha"], p["omega_c"])
    omega = spec.omega
    weak = _nan_on_invalid(lambda s: qubit.weak_coupling_excitation(s).p_plus, spec)
    t_star = _nan_on_invalid(qubit.crossover_temperature, spec)
    if math.isnan(t_star):
        gibbs = boltz = math.nan
    else:
        gibbs = qubit.gibbs_probabilities(omega, t_star)[0]
        boltz = qubit.boltzmann_excitation(omega, t_star)
    return [(t_star, weak, gibbs, boltz)]


def _ring_current(p):
    spec = ring.RingSpec(p["t_left"], p["t_right"], int(p["parity_sign"]), p["epsilon"], p["alpha"])
    flux = p["flux"]
    delta = ring.tunnel_coupling(spec, flux)
    i0 = _nan_on_invalid(ring.current_amplitude, spec, flux)
    symmetric = spec.t_left == spec.t_right and spec.parity_sign == -1 and spec.epsilon == 0
    bethe = ring.bethe_current(flux, spec.alpha, spec.t_left) if symmetric else math.nan
    return [(delta, i0, bethe)]


def _ring_harmonics(p):
    series = ring.fourier_harmonics(p["alpha"], int(p["n_max"]))
    return [
        (n, series.amplitudes[n - 1], series.ratio(n), float(ring.pilgram_ratio(n, p["alpha"])))
        for n in range(1, int(p["n_max"]) + 1)
    ]


def _ring_exponents(p):
    out = []
    for n in range(2, int(p["n_max"]) + 1):
        b = ring.ansatz_exponent(n)
        out.append((n, float(b), f"{b.numerator}/{b.denominator}"))
    return out


def _cpb_map(p):
    spec = ring.CpbSpec(p["e_josephson"], p["e_charging"], p["n_gate"], p["flux_x"])
    r = ring.cpb_effective_spec(spec)
    return [(r.epsilon, r.delta, r.omega, r.current_amplitude)]


def _osc_cumulants(p):
    x, y = oscillator.ohmic_xy(p["alpha"], p["cutoff_ratio"])
    shape = oscillator.ShapeParams.from_xy(x, y, p["epsilon"])
    return [(x, y, shape.mean_energy, shape.uncertainty, *oscillator.cumulants(shape), oscillator.purity(shape))]


def _osc_levels(p):
    shape = oscillator.ShapeParams.from_xy(p["x"], p["y"], p["epsilon"])
    dist = oscillator.level_populations(shape, int(p["n_max"]))
    energies = dist.energies(shape.epsilon)
    return [(n, energies[n], dist.populations[n]) for n in range(dist.n_max + 1)]


def _osc_surface(p):
    x, y = oscillator.ohmic_xy(p["alpha"], p["cutoff_ratio"])
    shape = oscillator.ShapeParams.from_xy(x, y)
    levels = int(p["levels"])
    dist = oscillator.level_populations(shape, levels - 1)
    return [(x, y, oscillator.purity(shape), *dist.populations)]


def _chain_spec(p):
    return chain.ChainSpec(
        n_sites=int(p["N"]),
        m=1.0,
        omega=p["omega_ratio"],
        m_h=p["mh_over_m"],
        omega_h=1.0,
        boundary=p["boundary"],
    )


def _chain_correlation(p):
    spec = _chain_spec(p)
    t_max = 3.0 * spec.n_sites if math.isnan(p["t_max"]) else p["t_max"]
    trace = chain.energy_correlation(spec, np.linspace(0.0, t_max, int(p["points"])))
    if trace.times[-1] >= 3.0 * spec.n_sites:
        t_rev, ratio = chain.revival_metrics(trace, spec)
        print(f"# N={spec.n_sites} C(0)={trace.initial!r} t_revival={t_rev!r} peak_ratio={ratio!r}", file=sys.stderr)
    return list(zip(trace.times, trace.values))


def _oracle_spinboson(p):
    spec = qubit.TwoLevelSpec(p["epsilon"], p["delta"], p["alpha"], p["omega_c"])
    bath = oracle.discretize_ohmic(p["alpha"], p["omega_c"], int(p["modes"]), p["scheme"])
    res = oracle.spin_boson_ground_state(spec, bath, int(p["n_max"]))
    pt = oracle.perturbative_excitation(spec, bath)
    return [(res.p_plus, pt, res.mean_energy, res.state.energy, res.state.dimension)]


def _oracle_oscillator(p):
    spec = _chain_spec(p)
    t = np.linspace(0.0, p["t_max"], int(p["points"]))
    fock = oracle.fock_ed_oscillator(spec, int(p["n_max"]), times=t)
    wick = chain.energy_correlation(spec, t).values
    q2, p2 = oracle.oscillator_bath_covariance(*oracle.chain_potential(spec))
    shape = oscillator.shape_from_state(oscillator.GaussianOscState(q2, p2, spec.m, spec.omega))
    closed = oscillator.level_populations(shape, 3).populations
    print("# rho_nn ED: " + " ".join(repr(float(v)) for v in fock.populations[:4]), file=sys.stderr)
    print("# rho_nn closed form: " + " ".join(repr(float(v)) for v in closed), file=sys.stderr)
    return list(zip(t, fock.correlation, wick))


SUBCOMMANDS: dict[str, Subcommand] = {}


def _register(name, help, params, columns, rows):
    cols = columns if callable(columns) else (lambda p, c=columns: list(c))
    SUBCOMMANDS[name] = Subcommand(name, help, tuple(params), cols, rows)


_register(
    "qubit-probs",
    "weak-coupling excitation probability and energy moments",
    [Param("epsilon", 0.0, unit="energy"), Param("delta", 1.0, unit="energy"),
     Param("alpha", "0:0.05:6"), Param("omega_c", 100.0, unit="energy")],
    ["p_plus[1]", "p_minus[1]", "mean_energy[energy]", "energy_variance[energy^2]", "purity_diagonal[1]",
     "weak_coupling_reliable[bool]"],
    _qubit_probs,
)
_register(
    "qubit-energy-dist",
    "two-peak energy distribution from the mean energy",
    [Param("omega", 1.0, unit="energy"), Param("mean_energy", "-0.5:0.5:11", unit="energy")],
    ["E_minus[energy]", "E_plus[energy]", "p_minus[1]", "p_plus[1]", "p_plus_printed_form[1]"],
    _qubit_energy_dist,
)
_register(
    "qubit-crossover",
    "crossover temperature to entanglement-dominated excitation",
    [Param("epsilon", 0.0, unit="energy"), Param("delta", 1.0, unit="energy"),
     Param("alpha", "0.002:0.1:50"), Param("omega_c", 100.0, unit="energy")],
    ["T_star[energy]", "p_plus_weak[1]", "p_plus_gibbs_at_T_star[1]",
     "p_plus_boltzmann_at_T_star[1]"],
    _qubit_crossover,
)
_register(
    "ring-current",
    "persistent current of the ring qubit versus flux",
    [Param("alpha", 0.0), Param("flux", "0:1:201", unit="Phi_0"), Param("t_left", 1.0, unit="energy"),
     Param("t_right", 1.0, unit="energy"), Param("parity_sign", -1, kind=int), Param("epsilon", 0.0, unit="energy")],
    ["delta[energy]", "current_amplitude[energy/Phi_0]", "bethe_current[normalized]"],
    _ring_current,
)
_register(
    "ring-harmonics",
    "Fourier harmonics of the Bethe current and the product-formula ratios",
    [Param("alpha", "0:0.4:5"), Param("n_max", 6, kind=int, grid=False)],
    ["n[1]", "I_n[normalized]", "ratio_quadrature[1]", "ratio_product[1]"],
    _ring_harmonics,
)
_register(
    "ring-exponents",
    "exact suppression exponents b_n at zero coupling",
    [Param("n_max", 4, kind=int, grid=False)],
    ["n[1]", "b_n[1]", "b_n_exact[1]"],
    _ring_exponents,
)
_register(
    "cpb-map",
    "split Cooper pair box mapped onto two-level parameters",
    [Param("e_josephson", 1.0, unit="energy"), Param("e_charging", 4.0, unit="energy"),
     Param("n_gate", "0:1:11"), Param("flux_x", "0:1:11", unit="Phi_0")],
    ["epsilon[energy]", "delta[energy]", "Omega[energy]", "current_amplitude[energy/Phi_0]"],
    _cpb_map,
)
_register(
    "osc-cumulants",
    "energy cumulants of the ohmically damped oscillator",
    [Param("alpha", "0:0.9:10"), Param("cutoff_ratio", 10.0), Param("epsilon", 1.0, unit="energy")],
    ["x[1]", "y[1]", "E[energy]", "A[1]", "kappa_1[energy]", "kappa_2[energy^2]", "kappa_3[energy^3]",
     "kappa_4[energy^4]", "purity[1]"],
    _osc_cumulants,
)
_register(
    "osc-levels",
    "level populations of a Gaussian oscillator state",
    [Param("x", 1.0), Param("y", 2.0), Param("epsilon", 1.0, unit="energy"), Param("n_max", 10, kind=int, grid=False)],
    ["n[1]", "energy[energy]", "rho_nn[1]"],
    _osc_levels,
)
_register(
    "osc-ohmic-surface",
    "lowest level populations along the ohmic trajectory",
    [Param("alpha", "0:0.95:20"), Param("cutoff_ratio", 10.0), Param("levels", 4, kind=int, grid=False)],
    lambda p: ["x[1]", "y[1]", "purity[1]"] + [f"rho_{n}{n}[1]" for n in range(int(p["levels"]))],
    _osc_surface,
)
_register(
    "chain-correlation",
    "energy-energy correlation of an oscillator on a finite chain",
    [Param("N", 50, kind=int), Param("mh_over_m", 0.1), Param("omega_ratio", 1.0),
     Param("boundary", "free_end", kind=str, grid=False), Param("points", 2048, kind=int, grid=False),
     Param("t_max", math.nan, unit="1/omega_h", grid=False)],
    ["t[1/omega_h]", "C[(hbar omega_h)^2]"],
    _chain_correlation,
)
_register(
    "oracle-spinboson",
    "exact diagonalisation of the discretised spin-boson model",
    [Param("alpha", "0.0025:0.02:4"), Param("epsilon", 0.0, unit="energy"), Param("delta", 1.0, unit="energy"),
     Param("omega_c", 50.0, unit="energy"), Param("modes", 4, kind=int), Param("n_max", 6, kind=int),
     Param("scheme", "log", kind=str, grid=False)],
    ["p_plus_ed[1]", "p_plus_perturbative[1]", "mean_energy_ed[energy]", "ground_energy[energy]", "dimension[1]"],
    _oracle_spinboson,
)
_register(
    "oracle-oscillator",
    "Fock-space diagonalisation of an oscillator on a 1- or 2-site chain",
    [Param("N", 1, kind=int, grid=False), Param("mh_over_m", 0.05, grid=False), Param("omega_ratio", 1.0, grid=False),
     Param("boundary", "free_end", kind=str, grid=False), Param("n_max", 30, kind=int, grid=False),
     Param("t_max", 10.0, unit="1/omega_h", grid=False), Param("points", 201, kind=int, grid=False)],
    ["t[1/omega_h]", "C_ed[(hbar omega_h)^2]", "C_wick[(hbar omega_h)^2]"],
    _oracle_oscillator,
)

VERIFY = "verify"

# ------------------------------------------------------------ configuration


def parse_config_file(path) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment.  Values stay strings."""
    out: dict[str, str] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        if not sep or not key or not value or not key.isidentifier():
            raise ConfigError(f"{path}:{lineno}: malformed line {raw.strip()!r} (expected 'key = value')")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _convert(param: Param, raw) -> object:
    if not isinstance(raw, str):
        return raw
    if param.kind is str:
        return raw
    if ":" in raw:
        if not param.grid:
            raise ValidationError(f"parameter {param.name!r} does not accept a grid")
        parts = raw.split(":")
        if len(parts) != 3:
            raise ValidationError(f"grid for {param.name!r} must be start:stop:count, got {raw!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ValidationError(f"bad grid for {param.name!r}: {raw!r}") from exc
        if count < 1:
            raise ValidationError(f"grid count for {param.name!r} must be >= 1")
        values = np.linspace(start, stop, count)
        return [int(round(v)) for v in values] if param.kind is int else [float(v) for v in values]
    try:
        return param.kind(float(raw)) if param.kind is int else param.kind(raw)
    except ValueError as exc:
        raise ValidationError(f"bad value for {param.name!r}: {raw!r}") from exc


def resolve_params(sub: Subcommand, file_values: dict, flag_values: dict) -> dict:
    valid = {p.name for p in sub.params}
    for source in (file_values, flag_values):
        unknown = sorted(set(source) - valid)
        if unknown:
            raise ConfigError(
                f"unknown key(s) {', '.join(unknown)} for {sub.name}; valid keys: {', '.join(sorted(valid)) or '(none)'}"
            )
    merged = {}
    for p in sub.params:
        raw = flag_values.get(p.name, file_values.get(p.name, p.default))
        merged[p.name] = _convert(p, raw)
    return merged


# ------------------------------------------------------------------ running


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        # shortest repr that round-trips a double (<= 17 significant digits)
        return repr(float(v))
    return str(v)


def _expand(sub: Subcommand, params: dict):
    gridded = [p.name for p in sub.params if isinstance(params[p.name], list)]
    axes = [params[name] for name in gridded]
    points = []
    for combo in itertools.product(*axes):
        point = dict(params)
        point.update(zip(gridded, combo))
        points.append(point)
    return gridded, points


def _rows_for(args):
    name, point = args
    return SUBCOMMANDS[name].rows(point)


def execute(config: RunConfig) -> str:
    """Run a configured sweep and return the CSV text."""
    sub = SUBCOMMANDS[config.subcommand]
    gridded, points = _expand(sub, config.params)
    units = {p.name: p.unit for p in sub.params}
    header = [f"{g}[{units[g]}]" for g in gridded] + sub.columns(config.params)
    tasks = [(sub.name, pt) for pt in points]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            blocks = list(pool.map(_rows_for, tasks))
    else:
        blocks = [_rows_for(t) for t in tasks]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for point, block in zip(points, blocks):
        lead = [point[g] for g in gridded]
        for row in block:
            writer.writerow([_fmt(v) for v in (*lead, *row)])
    return buf.getvalue()


def _write(text: str, output: str | None):
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _run_verify(config: RunConfig) -> int:
    from .verify import run_checks

    results = run_checks(emit=lambda line: print(line, file=sys.stderr))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check[name]", "passed[bool]", "detail[text]"])
    for r in results:
        writer.writerow([r.name, int(r.passed), r.detail])
    _write(buf.getvalue(), config.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _default_jobs() -> int:
    raw = os.environ.get("ENTENERG_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entenerg", description="Ground-state entanglement energetics.")
    subs = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    for sub in list(SUBCOMMANDS.values()) + [None]:
        name = VERIFY if sub is None else sub.name
        sp = subs.add_parser(name, help="run the acceptance and invariant checks" if sub is None else sub.help)
        sp.add_argument("--config", help="file of 'key = value' lines; flags override it")
        sp.add_argument("-o", "--output", help="output file (default: stdout)")
        sp.add_argument("--jobs", type=int, default=None, help="worker processes (default: $ENTENERG_JOBS or 1)")
        for p in () if sub is None else sub.params:
            sp.add_argument(
                "--" + p.name.replace("_", "-"),
                dest="param_" + p.name,
                default=None,
                metavar="VALUE",
                help=f"default {p.default}" + (" (value or start:stop:count)" if p.grid and p.kind is not str else ""),
            )
    return parser


def parse_args(argv) -> RunConfig:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    if args.subcommand is None:
        raise ConfigError("missing subcommand; choose from " + ", ".join([*SUBCOMMANDS, VERIFY]))
    if args.subcommand == VERIFY:
        if extra:
            raise ConfigError(f"unknown arguments {' '.join(extra)}; verify accepts no parameters")
        return RunConfig(VERIFY, {}, args.output, args.jobs or _default_jobs())
    sub = SUBCOMMANDS[args.subcommand]
    if extra:
        names = sorted(e.lstrip("-").split("=")[0].replace("-", "_") for e in extra if e.startswith("-"))
        raise ConfigError(
            f"unknown key(s) {', '.join(names) or ' '.join(extra)} for {sub.name}; "
            f"valid keys: {', '.join(sorted(p.name for p in sub.params))}"
        )
    flags = {k[len("param_"):]: v for k, v in vars(args).items() if k.startswith("param_") and v is not None}
    file_values = parse_config_file(args.config) if args.config else {}
    params = resolve_params(sub, file_values, flags)
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    if jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    return RunConfig(sub.name, params, args.output, jobs)


def run(config: RunConfig) -> int:
    if config.subcommand == VERIFY:
        return _run_verify(config)
    _write(execute(config), config.output)
    return EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_args(argv)
        return run(config)
    except ConvergenceError as exc:
        print(f"entenerg: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except (EntenergError, OSError) as exc:
        print(f"entenerg: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:
        # argparse usage errors
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
