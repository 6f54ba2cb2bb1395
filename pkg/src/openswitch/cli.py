"""Command-line front end.

Subcommands::

    openswitch sweep --config run.toml --out results/ [--set key=value ...]
    openswitch single --epsilon 0.3 --n 5 --beta inf --outcome minus
    openswitch oracle-check [--max-n 20]
    openswitch validate-paper

Exit codes: 0 success, 1 validation failure, 2 config error, 3 I/O error.

Config files are TOML.  Every key is optional::

    g_tau = 0.2
    omega = 1.0
    omega_s = 1.0
    collision_counts = [0, 1, 2, 3, 5, 10, 20, 50]
    betas = [0.1, 5.0, "inf"]
    postselections = ["plus", "minus"]
    include_definite_baseline = true
    engine = "analytic"          # or "bruteforce", "both"

    [epsilon]
    min = 0.0
    max = 1.0
    steps = 201
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Optional, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .experiments import (
    SINGLET,
    ConfigError,
    EpsilonGrid,
    ScenarioConfig,
    SweepRecord,
    bell_mub_switch,
    definite_baseline,
    engine_discrepancy,
    make_params,
    open_control_record,
    reference_a_diff,
    reference_a_mm,
    reference_a_pp,
    reference_a_sum,
    run_sweep,
)
from .opencontrol import oracle_gap
from .quantum import INF, DensityMatrix, ProjectorSet, trace_distance
from .switch import postselect

__all__ = [
    "CSV_HEADER",
    "CheckResult",
    "parse_config",
    "format_float",
    "emit_csv",
    "emit_plot_script",
    "validate_paper",
    "oracle_check",
    "main",
]

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
CSV_HEADER = ("epsilon", "n", "beta", "postselect", "p_post", "concurrence", "engine")

_TOP_KEYS = {
    "epsilon",
    "collision_counts",
    "betas",
    "g_tau",
    "omega",
    "omega_s",
    "postselections",
    "include_definite_baseline",
    "engine",
}
_GRID_KEYS = {"min", "max", "steps"}


# -- config -----------------------------------------------------------------

def _number(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(name, f"expected a number, got {value!r}")
    return float(value)


def _beta(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "+inf", "infinity"):
            return INF
        raise ConfigError("betas", f"expected a number or 'inf', got {value!r}")
    return _number("betas", value)


def _as_list(name: str, value) -> list:
    if not isinstance(value, list):
        raise ConfigError(name, f"expected a list, got {value!r}")
    return value


def _merge(base: dict, extra: dict):
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(base.get(k), dict):
            _merge(base[k], v)
        else:
            base[k] = v


def _load_toml(text: str) -> dict:
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        # message carries "(at line L, column C)"
        raise ConfigError("config", f"parse error: {exc}") from None


def _override_doc(item: str) -> dict:
    key, sep, value = item.partition("=")
    if not sep or not key.strip():
        raise ConfigError("override", f"expected key=value, got {item!r}")
    try:
        return tomllib.loads(f"{key.strip()} = {value.strip()}")
    except tomllib.TOMLDecodeError:
        return _load_toml(f'{key.strip()} = "{value.strip()}"')


def parse_config(text: bytes | str = b"", overrides: Sequence[str] = ()) -> ScenarioConfig:
    """Build a validated ScenarioConfig from a TOML document plus key=value overrides."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError("config", f"not valid UTF-8: {exc}") from None
    doc = _load_toml(text)
    for item in overrides:
        _merge(doc, _override_doc(item))

    for key in doc:
        if key not in _TOP_KEYS:
            raise ConfigError(key, "unknown key")
    kwargs = {}
    if "epsilon" in doc:
        grid = doc["epsilon"]
        if not isinstance(grid, dict):
            raise ConfigError("epsilon", "expected a table with min, max, steps")
        for key in grid:
            if key not in _GRID_KEYS:
                raise ConfigError(f"epsilon.{key}", "unknown key")
        defaults = EpsilonGrid()
        steps = grid.get("steps", defaults.steps)
        if isinstance(steps, bool) or not isinstance(steps, int):
            raise ConfigError("epsilon.steps", f"expected an integer, got {steps!r}")
        kwargs["epsilon"] = EpsilonGrid(
            _number("epsilon.min", grid.get("min", defaults.min)),
            _number("epsilon.max", grid.get("max", defaults.max)),
            steps,
        )
    if "collision_counts" in doc:
        counts = _as_list("collision_counts", doc["collision_counts"])
        if any(isinstance(n, bool) or not isinstance(n, int) for n in counts):
            raise ConfigError("collision_counts", "entries must be integers")
        kwargs["collision_counts"] = tuple(counts)
    if "betas" in doc:
        raw = doc["betas"]
        raw = raw if isinstance(raw, list) else [raw]
        kwargs["betas"] = tuple(_beta(b) for b in raw)
    for key in ("g_tau", "omega", "omega_s"):
        if key in doc:
            kwargs[key] = _number(key, doc[key])
    if "postselections" in doc:
        kwargs["postselections"] = tuple(_as_list("postselections", doc["postselections"]))
    if "include_definite_baseline" in doc:
        flag = doc["include_definite_baseline"]
        if not isinstance(flag, bool):
            raise ConfigError("include_definite_baseline", "expected true or false")
        kwargs["include_definite_baseline"] = flag
    if "engine" in doc:
        kwargs["engine"] = doc["engine"]
    return ScenarioConfig(**kwargs)


# -- output -----------------------------------------------------------------

def format_float(x: float) -> str:
    """Shortest round-trip decimal; integral values without a fraction; inf as 'inf'."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _row(r: SweepRecord) -> list[str]:
    conc = "" if r.concurrence is None else format_float(r.concurrence)
    return [format_float(r.epsilon), str(r.n), format_float(r.beta), r.postselect, format_float(r.p_post), conc, r.engine]


def emit_csv(records: Iterable[SweepRecord], sink: IO[str]):
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(_row(r))


def _unique(seq):
    return list(dict.fromkeys(seq))


def emit_plot_script(
    records: Sequence[SweepRecord],
    sink: IO[str],
    csv_name: str = "sweep.csv",
    provenance: Sequence[str] = (),
    image_name: str = "concurrence.png",
):
    """gnuplot script with one panel per (beta, outcome) reading ``csv_name``."""
    if not records:
        raise ValueError("no records to plot")
    betas = _unique(r.beta for r in records)
    outcomes = _unique(r.postselect for r in records if r.postselect != "definite")
    counts = _unique(r.n for r in records)
    engine = records[0].engine
    has_definite = any(r.postselect == "definite" for r in records)

    def series(n, beta, outcome, style):
        cond = (
            f'strcol(2) eq "{n}" && strcol(3) eq "{format_float(beta)}" '
            f'&& strcol(4) eq "{outcome}" && strcol(7) eq "{engine}"'
        )
        return f'"{csv_name}" every ::1 using (({cond}) ? $1 : 1/0):6 {style}'

    lines = ["# gnuplot script; data is read from the CSV next to this file"]
    lines += [f"# override: {item}" for item in provenance]
    lines += [
        'set datafile separator ","',
        'set terminal pngcairo size 600*%d,450*%d' % (max(1, len(outcomes)), len(betas)),
        f'set output "{image_name}"',
        f"set multiplot layout {len(betas)},{max(1, len(outcomes))}",
        "set xrange [0:1]",
        "set yrange [0:1]",
        'set xlabel "monitoring strength epsilon"',
        'set ylabel "concurrence"',
        "set key outside right",
    ]
    for beta in betas:
        for outcome in outcomes:
            lines.append(f'set title "beta = {format_float(beta)}, post-selected on {outcome}"')
            parts = [series(n, beta, outcome, f'with lines title "n = {n}"') for n in counts]
            if has_definite:
                parts.append(series(counts[0], beta, "definite", 'with lines lw 2 lc rgb "red" title "definite"'))
            lines.append("plot " + ", \\\n     ".join(parts))
    lines.append("unset multiplot")
    sink.write("\n".join(lines) + "\n")


# -- checks -----------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def validate_paper(bases: Optional[tuple[ProjectorSet, ProjectorSet]] = None) -> list[CheckResult]:
    """Closed-form Bell-pair results: block matrices, outcome probabilities,
    the singlet conditional, and the analytic-vs-brute-force oracle."""
    results = []
    refs = {
        "A++": (reference_a_pp, lambda sw: sw.a_pp.mat),
        "A--": (reference_a_mm, lambda sw: sw.a_mm.mat),
        "A++ + A--": (reference_a_sum, lambda sw: sw.a_pp.mat + sw.a_mm.mat),
        "A++ - A--": (reference_a_diff, lambda sw: sw.a_pp.mat - sw.a_mm.mat),
    }
    for eps in (0.0, 0.25, 0.5, 1.0):
        sw = bell_mub_switch(eps, bases)
        for name, (ref, got) in refs.items():
            err = float(np.abs(got(sw) - ref(eps)).max())
            results.append(CheckResult(f"matrix {name} eps={eps:g}", err <= 1e-12, f"max|diff|={err:.2e}"))

    for eps in (0.25, 0.5, 1.0):
        sw = bell_mub_switch(eps, bases)
        for outcome, want in (("plus", 1 - eps**2 / 4), ("minus", eps**2 / 4)):
            err = abs(postselect(sw, outcome).probability - want)
            results.append(CheckResult(f"p({outcome}) eps={eps:g}", err <= 1e-12, f"|diff|={err:.2e}"))

    singlet = DensityMatrix.pure(SINGLET, (2, 2))
    for eps in (0.1, 0.5, 1.0):
        post = postselect(bell_mub_switch(eps, bases), "minus")
        dist = trace_distance(post.conditional, singlet) if post.defined else math.inf
        results.append(CheckResult(f"minus conditional is singlet eps={eps:g}", dist <= 1e-12, f"trace dist={dist:.2e}"))

    for eps in (0.25, 0.5, 1.0):
        sw = bell_mub_switch(eps, bases)
        for beta in (0.0, 1.0, INF):
            gap = oracle_gap(sw, make_params(beta, g_tau=0.2), 10)
            results.append(
                CheckResult(f"oracle g*tau=0.2 beta={format_float(beta)} eps={eps:g} n<=10", gap <= 1e-9, f"trace dist={gap:.2e}")
            )
    return results


def oracle_check(
    max_n: int = 20,
    g_taus: Sequence[float] = (0.05, 0.2, 0.5),
    betas: Sequence[float] = (0.0, 1.0, 5.0, INF),
    epsilons: Sequence[float] = (0.25, 0.5, 1.0),
) -> list[CheckResult]:
    out = []
    for eps in epsilons:
        sw = bell_mub_switch(eps)
        for gt in g_taus:
            for beta in betas:
                gap = oracle_gap(sw, make_params(beta, g_tau=gt), max_n)
                label = f"eps={eps:g} g*tau={gt:g} beta={format_float(beta)} n<={max_n}"
                out.append(CheckResult(label, gap <= 1e-9, f"trace dist={gap:.2e}"))
    return out


def _print_table(results: Sequence[CheckResult], out: IO[str]) -> bool:
    width = max(len(r.name) for r in results)
    for r in results:
        out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}\n")
    ok = all(r.passed for r in results)
    out.write(f"{sum(r.passed for r in results)}/{len(results)} checks passed\n")
    return ok


# -- entry point ------------------------------------------------------------

def _parse_beta_arg(text: str) -> float:
    try:
        beta = float(text)  # accepts "inf"
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid beta {text!r}") from None
    if math.isnan(beta) or beta < 0:
        raise argparse.ArgumentTypeError("beta must be >= 0 or inf")
    return beta


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="openswitch", description="Quantum switch with a thermally monitored control.")
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="run a concurrence sweep, write sweep.csv and plot.gp")
    sw.add_argument("--config", type=Path, help="TOML config (defaults used when omitted)")
    sw.add_argument("--out", type=Path, required=True, help="output directory")
    sw.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE")

    si = sub.add_parser("single", help="evaluate one grid point and print it as CSV")
    si.add_argument("--epsilon", type=float, required=True)
    si.add_argument("--n", type=int, required=True)
    si.add_argument("--beta", type=_parse_beta_arg, required=True)
    si.add_argument("--outcome", choices=("plus", "minus", "definite"), required=True)
    si.add_argument("--engine", choices=("analytic", "bruteforce"), default="analytic")
    si.add_argument("--g-tau", type=float, default=0.2)

    oc = sub.add_parser("oracle-check", help="compare closed form with per-collision simulation")
    oc.add_argument("--max-n", type=int, default=20)

    sub.add_parser("validate-paper", help="check the closed-form Bell-pair results")
    return p


def _cmd_sweep(args, out: IO[str]) -> int:
    text = b""
    if args.config is not None:
        try:
            text = args.config.read_bytes()
        except OSError as exc:
            sys.stderr.write(f"error: cannot read {args.config}: {exc.strerror}\n")
            return EXIT_IO
    try:
        cfg = parse_config(text, args.overrides)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG

    start = time.perf_counter()
    records = run_sweep(cfg)
    elapsed = time.perf_counter() - start
    csv_path = args.out / "sweep.csv"
    plot_path = args.out / "plot.gp"
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            emit_csv(records, fh)
        with open(plot_path, "w", encoding="utf-8", newline="") as fh:
            emit_plot_script(records, fh, csv_name=csv_path.name, provenance=args.overrides)
    except OSError as exc:
        sys.stderr.write(f"error: cannot write {exc.filename}: {exc.strerror}\n")
        return EXIT_IO
    out.write(f"{len(records)} records in {elapsed:.1f}s -> {csv_path}, {plot_path}\n")
    if cfg.engine == "both":
        gap = engine_discrepancy(records)
        out.write(f"max |concurrence(analytic) - concurrence(bruteforce)| = {gap:.3e}\n")
    return EXIT_OK


def _cmd_single(args, out: IO[str]) -> int:
    if not 0.0 <= args.epsilon <= 1.0 or args.n < 0 or not 0 < args.g_tau < math.pi / 2:
        sys.stderr.write("config error: need 0 <= epsilon <= 1, n >= 0, 0 < g_tau < pi/2\n")
        return EXIT_CONFIG
    params = make_params(args.beta, g_tau=args.g_tau)
    if args.outcome == "definite":
        rec = definite_baseline(args.epsilon, args.n, params, engine=args.engine)
    else:
        rec = open_control_record(args.epsilon, args.n, args.beta, args.outcome, params, engine=args.engine)
    emit_csv([rec], out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out: IO[str] = None) -> int:
    out = out if out is not None else sys.stdout
    args = _build_parser().parse_args(argv)
    if args.command == "sweep":
        return _cmd_sweep(args, out)
    if args.command == "single":
        return _cmd_single(args, out)
    if args.command == "oracle-check":
        ok = _print_table(oracle_check(max_n=args.max_n), out)
        return EXIT_OK if ok else EXIT_FAIL
    ok = _print_table(validate_paper(), out)
    return EXIT_OK if ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
