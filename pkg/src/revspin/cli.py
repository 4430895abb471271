"""Command-line front end writing figure data and recovery metrics as CSV.

    revspin figure --id 3 --out out/
    revspin metrics --preset paper-3-1
    revspin oracle-check --max-2j 8 --max-2s 6 --tol 1e-10
    revspin sweep --vary j --range 1/2:20:1/2 --preset paper-3-1

Exit codes: 0 success, 2 bad arguments, 3 a required condition fails
(e.g. the measurement is not reversible), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import bayes, oracle, prep, reverse
from .measure import MeasurementParams, coefficients, information_condition, measure, reversibility_condition
from .spincore import HalfInt, SpinState, half_int_parse

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONDITION = 3
EXIT_NUMERIC = 4

FIGURE_IDS = (1, 3, 4, 5, 6, 7, 8, 9, 10, 11)


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_USAGE):
        super().__init__(message)
        self.code = code


# --- angle grammar -------------------------------------------------------

_NUMBER = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?"
_ANGLE_RE = re.compile(rf"^(-)?(?:(?P<num>{_NUMBER})|(?P<coef>{_NUMBER})?pi(?:/(?P<div>\d+))?)$")


def parse_angle(text: str) -> float:
    """Parse ``[-](NUMBER | [NUMBER]pi[/POSINT])`` into radians."""
    m = _ANGLE_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed angle: {text!r}")
    sign = -1.0 if m.group(1) else 1.0
    if m.group("num") is not None:
        return sign * float(m.group("num"))
    value = math.pi
    if m.group("coef") is not None:
        value = float(m.group("coef")) * value
    if m.group("div") is not None:
        div = int(m.group("div"))
        if div == 0:
            raise ValueError(f"division by zero in angle: {text!r}")
        value = value / div
    return sign * value


def format_angle(x: float) -> str:
    return repr(float(x))


# --- CSV formatting ------------------------------------------------------


def format_float(x: float) -> str:
    """12 significant digits; scientific only for |x| < 1e-4 or |x| >= 1e6."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    if abs(x) < 1e-4 or abs(x) >= 1e6:
        mant, exp = f"{x:.11e}".split("e")
        if "." in mant:
            mant = mant.rstrip("0").rstrip(".")
        return f"{mant}e{int(exp):+03d}"
    return f"{x:.12g}"


def _cell(v) -> str:
    if isinstance(v, HalfInt):
        return str(v)
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format_float(v)


def write_csv(target, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    writer = csv.writer(target, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])


def _write_file(path: Path, header, rows) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            write_csv(fh, header, rows)
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_USAGE) from exc


# --- scenarios -----------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    """Everything needed to build a state and a measurement."""

    s: HalfInt
    j: HalfInt
    g: float
    theta: float
    phi: float
    state_spec: str = "equal"
    outputs: tuple[str, ...] = ()
    gamma: float = math.pi / 6
    m: Optional[HalfInt] = None
    varphi: float = 0.0
    precision: dict = field(default_factory=dict, compare=False)

    def params(self) -> MeasurementParams:
        return MeasurementParams(self.j, self.theta, self.phi, self.g)

    def state(self) -> SpinState:
        return parse_state_spec(self.state_spec, self.s)


PRESETS: dict[str, dict] = {
    "paper-3-1": dict(
        s="1/2",
        j="10",
        g=0.25,
        theta="pi/6",
        phi="pi/6",
        state="equal",
        precision=dict(avg_fidelity_first=2, avg_fidelity_joint=2, q=2, q_prime=2, delta_m=1),
    ),
    "paper-4-2": dict(
        s="10",
        j="50",
        g=0.01,
        theta="pi/12",
        phi="pi/4",
        state="coherent-x",
        precision=dict(avg_fidelity_first=3, avg_fidelity_joint=3, delta_m_tilde=1, q_prime=5),
    ),
    "paper-4-3-xcat": dict(
        s="10",
        j="50",
        g=0.01,
        theta="pi/12",
        phi="pi/4",
        state="cat-x:0.6,0,0,0.8",
        precision=dict(q_prime=5),
    ),
    "paper-4-3-zcat": dict(
        s="10",
        j="50",
        g=0.01,
        theta="pi/12",
        phi="pi/4",
        state="cat-z:1,0,1,0",
        precision=dict(q_prime=2),
    ),
}

# figures 1-7 use the spin-1/2 scenario, 9-11 the s = 10 one; 8 has its own flags
FIGURE_DEFAULTS: dict[int, str] = {i: "paper-3-1" for i in (1, 3, 4, 5, 6, 7)}
FIGURE_DEFAULTS.update({i: "paper-4-2" for i in (9, 10, 11)})
FIGURE8_DEFAULTS = dict(s="10", j="10", g=0.25, m="5", varphi="0")


def _parse_complex_pairs(text: str, count: int) -> list[complex]:
    parts = text.split(",")
    if len(parts) != 2 * count:
        raise ValueError(f"expected {2 * count} comma-separated numbers, got {text!r}")
    vals = [float(p) for p in parts]
    return [complex(vals[2 * i], vals[2 * i + 1]) for i in range(count)]


def read_amplitude_file(path: str, s: HalfInt) -> SpinState:
    """One ``RE IM`` line per sigma, descending; trailing newline required."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"cannot read amplitude file {path}: {exc}") from exc
    if not text.endswith("\n"):
        raise ValueError(f"amplitude file {path} must end with a newline")
    amps = []
    for lineno, line in enumerate(text[:-1].split("\n"), start=1):
        fields = line.split(" ")
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'RE IM', got {line!r}")
        amps.append(complex(float(fields[0]), float(fields[1])))
    if len(amps) != s.dim:
        raise ValueError(f"{path}: spin {s} needs {s.dim} lines, got {len(amps)}")
    return SpinState.from_amplitudes(s, amps)


def parse_state_spec(spec: str, s: HalfInt) -> SpinState:
    """Resolve a ``--state`` value for a system of spin ``s``."""
    kind, _, arg = spec.partition(":")
    if kind == "equal" and not arg:
        return SpinState.equal(s)
    if kind == "basis":
        return SpinState.basis(s, half_int_parse(arg))
    if kind == "coherent-x" and not arg:
        return prep.coherent_x_state(s)
    if kind == "coherent-eq":
        return prep.prepare_coherent_equatorial(s, parse_angle(arg))
    if kind in ("cat-x", "cat-z"):
        c_plus, c_minus = _parse_complex_pairs(arg, 2)
        return prep.cat_state(kind[-1], s, c_plus, c_minus)
    if kind == "amps":
        return read_amplitude_file(arg, s)
    raise ValueError(f"unknown state specification {spec!r}")


def _scenario_from_dict(d: dict) -> Scenario:
    if not math.isfinite(float(d["g"])):
        raise ValueError(f"g must be finite, got {d['g']!r}")
    return Scenario(
        s=half_int_parse(d["s"]),
        j=half_int_parse(d["j"]),
        g=float(d["g"]),
        theta=parse_angle(d["theta"]),
        phi=parse_angle(d["phi"]),
        state_spec=d.get("state", "equal"),
        precision=dict(d.get("precision", {})),
    )


def build_scenario(args: argparse.Namespace, base: Optional[str]) -> Scenario:
    """Start from preset ``base`` (if any) and apply explicit flags."""
    if base is not None:
        if base not in PRESETS:
            raise CliError(f"unknown preset {base!r}; choose from {', '.join(sorted(PRESETS))}")
        d = dict(PRESETS[base])
    else:
        d = dict(s="1/2", j="10", g=0.25, theta="pi/6", phi="pi/6", state="equal")
    for key in ("s", "j", "g", "theta", "phi", "state"):
        val = getattr(args, key, None)
        if val is not None:
            d[key] = val
    try:
        sc = _scenario_from_dict(d)
        if getattr(args, "gamma", None) is not None:
            sc = replace(sc, gamma=parse_angle(args.gamma))
        sc.params()
        sc.state()
    except (ValueError, TypeError) as exc:
        raise CliError(f"invalid scenario: {exc}") from exc
    return sc


# --- computations --------------------------------------------------------


def _require_reversible(sc: Scenario) -> None:
    cond = reversibility_condition(sc.params(), sc.s)
    if not cond:
        raise CliError(f"reversal requested but the measurement is not reversible: {cond.diagnostic}", EXIT_CONDITION)


def compute_metrics(sc: Scenario) -> dict[str, float]:
    """Average fidelities and recovery metrics for one scenario."""
    _require_reversible(sc)
    state, params = sc.state(), sc.params()
    first = measure(state, params)
    joint = reverse.joint_measure(state, params)
    out = {
        "avg_fidelity_first": first.average_fidelity(),
        "avg_fidelity_joint": joint.average_fidelity(),
    }
    if sc.s == reverse.HALF:
        info = information_condition(params, sc.s)
        if not info:
            raise CliError(f"the measurement gains no information: {info.diagnostic}", EXIT_CONDITION)
        out["avg_sq_fidelity_first"] = first.average_squared_fidelity()
        out["avg_sq_fidelity_joint"] = joint.average_squared_fidelity()
        out["q"] = reverse.recovery_probability(params)
        out["q_prime"] = reverse.approx_recovery_probability(state, params, joint=joint)
        out["delta_m"] = reverse.recovery_width(params)
    else:
        out["q_prime"] = reverse.approx_recovery_probability(state, params, joint=joint)
        out["delta_m_tilde"] = reverse.weak_width(params, sc.s)
        out["weak_condition_ratio"] = reverse.weak_condition_margin(params, sc.s)
    for k, v in out.items():
        if not math.isfinite(v):
            raise CliError(f"non-finite value for {k}", EXIT_NUMERIC)
    return out


def _rounded(value: float, digits: int) -> str:
    return f"{round(value, digits):.{digits}f}"


def metrics_rows(sc: Scenario) -> list[list]:
    rows = []
    for name, value in compute_metrics(sc).items():
        digits = sc.precision.get(name, 4)
        rows.append([name, value, _rounded(value, digits)])
    return rows


def figure_data(fig: int, sc: Scenario, j_max: HalfInt) -> tuple[list[str], list[list]]:
    params = sc.params()
    if fig == 1:
        table = coefficients(params, sc.s).table
        header = ["m_prime"] + [f"abs_a_sq_sigma_{sig}" for sig in sc.s.projections()]
        rows = [[mp] + list(np.abs(table[i]) ** 2) for i, mp in enumerate(params.j.projections())]
        return header, rows
    if fig in (3, 9):
        t = measure(sc.state(), params)
        return ["m", "p", "fidelity"], [[o.m, o.p, o.fidelity] for o in t]
    if fig in (4, 5, 10, 11):
        _require_reversible(sc)
        jt = reverse.joint_measure(sc.state(), params)
        values = jt.p if fig in (4, 10) else jt.fidelity
        name = "p" if fig in (4, 10) else "fidelity"
        outs = params.j.projections()
        rows = [[m, mp, values[i, k]] for i, m in enumerate(outs) for k, mp in enumerate(outs)]
        return ["m", "m_prime", name], rows
    if fig == 6:
        _require_reversible(sc)
        if sc.s != reverse.HALF:
            raise CliError("figure 6 needs s = 1/2")
        try:
            pair = bayes.make_hypothesis_pair(sc.gamma)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        rec = bayes.analyze_joint(pair, params)
        rows = [
            [m, rec.p[i], rec.info[i], rec.fidelity[i], rec.info_expected[i], rec.fidelity_expected[i]]
            for i, m in enumerate(params.j.projections())
        ]
        return ["m", "p", "info", "fidelity", "info_expected", "fidelity_expected"], rows
    if fig == 7:
        if sc.s != reverse.HALF:
            raise CliError("figure 7 needs s = 1/2")
        state = sc.state()
        rows = []
        for twice in range(1, j_max.twice + 1):
            p = params.replace(j=HalfInt(twice))
            rows.append(
                [
                    HalfInt(twice),
                    reverse.avg_sq_fidelity_first(state, p),
                    reverse.avg_sq_fidelity_joint(state, p),
                    reverse.recovery_probability(p),
                    reverse.asymptotic_recovery(p),
                ]
            )
        return ["j", "avg_sq_fidelity_first", "avg_sq_fidelity_joint", "q", "q_asymptotic"], rows
    if fig == 8:
        if sc.m is None:
            raise CliError("figure 8 needs --m")
        try:
            res = prep.subspace_prepare(sc.s, sc.j, sc.g, sc.varphi, sc.m)
        except (ValueError, ZeroDivisionError) as exc:
            raise CliError(str(exc), EXIT_NUMERIC) from exc
        initial = res.initial.weights
        rows = [[sig, initial[i], res.distribution[i]] for i, sig in enumerate(sc.s.projections())]
        return ["sigma", "initial_weight", "rho"], rows
    raise CliError(f"unknown figure id {fig}")


def _figure_scenario(args: argparse.Namespace) -> Scenario:
    if args.id == 8:
        d = dict(FIGURE8_DEFAULTS)
        for key in ("s", "j", "g", "m", "varphi"):
            val = getattr(args, key, None)
            if val is not None:
                d[key] = val
        try:
            return Scenario(
                s=half_int_parse(d["s"]),
                j=half_int_parse(d["j"]),
                g=float(d["g"]),
                theta=math.pi / 2,
                phi=0.0,
                m=half_int_parse(d["m"]),
                varphi=parse_angle(d["varphi"]),
            )
        except ValueError as exc:
            raise CliError(f"invalid scenario: {exc}") from exc
    return build_scenario(args, FIGURE_DEFAULTS[args.id])


def _scenario_meta(sc: Scenario, **extra) -> dict:
    meta = {
        "s": str(sc.s),
        "j": str(sc.j),
        "g": sc.g,
        "theta": sc.theta,
        "phi": sc.phi,
        "state": sc.state_spec,
    }
    meta.update(extra)
    return meta


# --- sweep ---------------------------------------------------------------


def _thread_count() -> int:
    raw = os.environ.get("REVSPIN_THREADS")
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        raise CliError(f"REVSPIN_THREADS must be a positive integer, got {raw!r}")
    return n


def sweep_values(vary: str, spec: str) -> list:
    """Expand ``A:B:STEP`` (inclusive of B when it lies on the grid)."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must be A:B:STEP, got {spec!r}")
    if vary == "j":
        a, b, step = (half_int_parse(p) for p in parts)
        if step.twice <= 0 or a.twice < 0:
            raise ValueError("j range needs a non-negative start and positive step")
        return [HalfInt(t) for t in range(a.twice, b.twice + 1, step.twice)]
    conv: Callable[[str], float] = float if vary == "g" else parse_angle
    a, b, step = (conv(p) for p in parts)
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return [a + k * step for k in range(max(n, 0))]


def run_sweep(sc: Scenario, vary: str, values: list, threads: int) -> tuple[list[str], list[list]]:
    def point(v):
        return compute_metrics(replace(sc, **{vary: v}))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(point, values))
    else:
        results = [point(v) for v in values]
    names = list(results[0]) if results else []
    rows = [[v] + [r[k] for k in names] for v, r in zip(values, results)]
    return [vary] + names, rows


# --- oracle check --------------------------------------------------------


def oracle_check_rows(max_2j: int, max_2s: int) -> list[list]:
    thetas = (math.pi / 7, 1.3, 2.8)
    phis = (-2.0, 0.3, 1.9)
    gs = (0.1, 0.45, 1.3)
    rng = np.random.default_rng(20240607)
    rows = []
    for two_s in range(1, max_2s + 1):
        s = HalfInt(two_s)
        raw = rng.normal(size=s.dim) + 1j * rng.normal(size=s.dim)
        state = SpinState.from_amplitudes(s, raw)
        for two_j in range(1, max_2j + 1):
            j = HalfInt(two_j)
            worst = 0.0
            for th in thetas:
                for ph in phis:
                    for g in gs:
                        params = MeasurementParams(j, th, ph, g)
                        closed = coefficients(params, s).table * state.amplitudes[None, :]
                        brute = oracle.evolve((th, ph), state, j, g).amplitudes
                        worst = max(worst, float(np.max(np.abs(closed - brute))))
            rows.append([two_j, two_s, worst])
    return rows


# --- argument parsing ----------------------------------------------------


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s", help="system spin (INT or INT/2)")
    p.add_argument("--j", help="probe spin (INT or INT/2)")
    p.add_argument("--g", help="interaction strength")
    p.add_argument("--theta", help="probe polar angle, e.g. pi/6")
    p.add_argument("--phi", help="probe azimuthal angle, e.g. pi/6")
    p.add_argument(
        "--state",
        help="equal | basis:SIGMA | coherent-x | coherent-eq:PHI | cat-x:RE,IM,RE,IM | cat-z:RE,IM,RE,IM | amps:FILE",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="revspin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="write the data behind one figure as CSV")
    fig.add_argument("--id", type=int, required=True, choices=FIGURE_IDS)
    fig.add_argument("--out", required=True, help="output directory")
    _add_scenario_flags(fig)
    fig.add_argument("--gamma", help="hypothesis angle for figure 6 (default pi/6)")
    fig.add_argument("--m", help="preparation outcome for figure 8")
    fig.add_argument("--varphi", help="coherent-state azimuth for figure 8")
    fig.add_argument("--j-max", default="50", help="largest probe spin for figure 7")

    met = sub.add_parser("metrics", help="average fidelities and recovery probabilities")
    met.add_argument("--preset", choices=sorted(PRESETS))
    met.add_argument("--out", help="output directory (default: stdout)")
    _add_scenario_flags(met)

    orc = sub.add_parser("oracle-check", help="compare closed forms with the brute-force simulator")
    orc.add_argument("--max-2j", type=int, default=8)
    orc.add_argument("--max-2s", type=int, default=6)
    orc.add_argument("--tol", type=float, default=1e-10)
    orc.add_argument("--out", help="output directory (default: stdout)")

    sw = sub.add_parser("sweep", help="metrics over a range of one parameter")
    sw.add_argument("--vary", required=True, choices=("j", "g", "theta", "phi"))
    sw.add_argument("--range", required=True, dest="range_spec", help="A:B:STEP")
    sw.add_argument("--preset", choices=sorted(PRESETS))
    sw.add_argument("--out", help="output directory (default: stdout)")
    _add_scenario_flags(sw)
    return parser


def _emit(out_dir: Optional[str], name: str, header, rows, stdout) -> None:
    if out_dir is None:
        write_csv(stdout, header, rows)
    else:
        _write_file(Path(out_dir) / name, header, rows)


def _run(args: argparse.Namespace, stdout) -> int:
    if args.command == "figure":
        sc = _figure_scenario(args)
        try:
            j_max = half_int_parse(args.j_max)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        header, rows = figure_data(args.id, sc, j_max)
        out = Path(args.out)
        _write_file(out / f"fig{args.id}.csv", header, rows)
        meta = _scenario_meta(sc, figure=args.id, rows=len(rows))
        if args.id == 6:
            meta["gamma"] = sc.gamma
        if args.id == 7:
            meta["j_max"] = str(j_max)
        if args.id == 8:
            meta.update(m=str(sc.m), varphi=sc.varphi, theta=sc.theta, phi=sc.phi)
            meta.pop("state")
        (out / f"fig{args.id}.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return EXIT_OK
    if args.command == "metrics":
        sc = build_scenario(args, args.preset)
        _emit(args.out, "metrics.csv", ["metric", "value", "rounded"], metrics_rows(sc), stdout)
        return EXIT_OK
    if args.command == "oracle-check":
        if args.max_2j < 1 or args.max_2s < 1:
            raise CliError("--max-2j and --max-2s must be positive")
        rows = oracle_check_rows(args.max_2j, args.max_2s)
        _emit(args.out, "oracle_check.csv", ["two_j", "two_s", "max_deviation"], rows, stdout)
        worst = max(r[2] for r in rows)
        return EXIT_OK if worst <= args.tol else EXIT_NUMERIC
    if args.command == "sweep":
        sc = build_scenario(args, args.preset)
        try:
            values = sweep_values(args.vary, args.range_spec)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        if not values:
            raise CliError("empty sweep range")
        header, rows = run_sweep(sc, args.vary, values, _thread_count())
        _emit(args.out, "sweep.csv", header, rows, stdout)
        return EXIT_OK
    raise CliError(f"unknown command {args.command}")


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args, stdout)
    except CliError as exc:
        print(f"revspin: {exc}", file=sys.stderr)
        return exc.code
    except (ZeroDivisionError, FloatingPointError, OverflowError) as exc:
        print(f"revspin: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main_exit() -> None:
    sys.exit(main())
