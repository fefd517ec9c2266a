"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 invalid scenario or parameters,
4 file I/O failure.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .core import DiseaseParams
from .engine import (BatchResult, ConfigError, Model, SimulationConfig, Summary, TimeSeries,
                     batch_simulate, simulate, summarize)
from .reference import r0_sir, r0_sis
from .scenario import (PRESETS, SITES, Scenario, ScenarioError, load_scenario, place_initial_infection,
                       save_scenario, validate, village_preset)

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_IO = 0, 2, 3, 4
HEADER = "t,S,I,R,D"
DEFAULT_MODEL = Model.SIR_FATALITY


def round_preserving_total(values: Sequence[float], places: int = 6) -> list[str]:
    """Fixed-point strings whose sum equals the rounded total of ``values``.

    Largest-remainder rounding on the 10**-places grid, ties broken by column.
    """
    scale = 10 ** places
    scaled = [v * scale for v in values]
    floors = [math.floor(x) for x in scaled]
    short = round(sum(scaled)) - sum(floors)
    order = sorted(range(len(values)), key=lambda k: (floors[k] - scaled[k], k))
    for k in order[:short]:
        floors[k] += 1
    return [f"{f // scale}.{f % scale:0{places}d}" if f >= 0 else f"{f / scale:.{places}f}" for f in floors]


def write_series_csv(series: TimeSeries, fh: TextIO, means: bool = False) -> None:
    fh.write(HEADER + "\n")
    for t, *counts in series.rows():
        cells = round_preserving_total(counts) if means else [str(int(c)) for c in counts]
        fh.write(",".join([str(t), *cells]) + "\n")


def write_replica_csv(summaries: Sequence[Summary], fh: TextIO) -> None:
    fh.write("replica,peak,peak_day,extinction_day,cumulative_deaths,cumulative_infections\n")
    for r, s in enumerate(summaries):
        ext = "" if s.extinction_day is None else str(s.extinction_day)
        fh.write(f"{r},{int(s.peak)},{s.peak_day},{ext},{int(s.cumulative_deaths)},"
                 f"{int(s.cumulative_infections)}\n")


def model_r0(model: Model, params: DiseaseParams) -> float | None:
    """Closed-form R0 matching the model family; None for plain SI."""
    if model is Model.SI:
        return None
    try:
        return r0_sis(params) if model.value.startswith("sis") else r0_sir(params)
    except ZeroDivisionError:
        return None


def format_summary(s: Summary, r0: float | None, means: bool = False) -> str:
    peak = f"{s.peak:.6f}" if means else str(int(s.peak))
    ext = "none" if s.extinction_day is None else str(s.extinction_day)
    r0_text = "n/a" if r0 is None else f"{r0:.4f}"
    return (f"peak={peak} peak_day={s.peak_day} extinction_day={ext} "
            f"cumulative_deaths={s.cumulative_deaths:g} r0={r0_text}")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _add_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    src = p.add_mutually_exclusive_group(required=required)
    src.add_argument("--scenario", type=Path, help="scenario JSON file")
    src.add_argument("--preset", choices=sorted(PRESETS), help="built-in village scenario")
    p.add_argument("--village-seed", type=_seed, default=0,
                   help="seed for village households and ages (presets only)")
    p.add_argument("--initial-site", choices=SITES, help="move patient zero to this site")


def _add_run(p: argparse.ArgumentParser) -> None:
    p.add_argument("--days", type=_positive_int, default=30)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--model", choices=[m.value for m in Model], default=DEFAULT_MODEL.value)
    p.add_argument("--output", type=Path, help="CSV destination (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cellepi", description="Impact-degree cellular automaton epidemics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="single seeded run, CSV of S/I/R/D counts")
    _add_source(p)
    _add_run(p)

    p = sub.add_parser("batch", help="Monte Carlo replicas, CSV of mean counts")
    _add_source(p)
    _add_run(p)
    p.add_argument("--replicas", type=_positive_int, default=100)
    p.add_argument("--workers", type=_positive_int, default=1, help="parallel replica processes")
    p.add_argument("--replica-output", type=Path,
                   help="per-replica summary CSV (default: <output stem>.replicas.csv)")

    p = sub.add_parser("village", help="write a village scenario JSON")
    p.add_argument("--preset", choices=sorted(PRESETS), default="village-a")
    p.add_argument("--village-seed", type=_seed, default=0)
    p.add_argument("--initial-site", choices=SITES)
    p.add_argument("--output", type=Path, required=True)

    p = sub.add_parser("validate", help="check a scenario and list every violation")
    _add_source(p)

    p = sub.add_parser("r0", help="closed-form basic reproduction number")
    _add_source(p, required=False)
    p.add_argument("--model", default="sir", help="sis or sir (model variants accepted)")
    for name in ("beta", "alpha", "mu", "theta"):
        p.add_argument(f"--{name}", type=float)
    return parser


def _load(args) -> Scenario:
    if args.scenario is not None:
        scenario = load_scenario(args.scenario)
    else:
        scenario = village_preset(args.preset, seed=args.village_seed)
    if args.initial_site:
        try:
            scenario = place_initial_infection(scenario, args.initial_site)
        except ValueError as exc:
            raise ScenarioError([str(exc)]) from exc
    return scenario


def _open_output(path: Path | None, stdout: TextIO):
    if path is None:
        return stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _emit(path: Path | None, stdout: TextIO, write) -> None:
    fh, close = _open_output(path, stdout)
    try:
        write(fh)
    finally:
        if close:
            fh.close()


def cmd_simulate(args, stdout: TextIO, stderr: TextIO) -> int:
    scenario = _load(args)
    config = SimulationConfig(args.model, args.days, args.seed)
    series = simulate(scenario, config)
    _emit(args.output, stdout, lambda fh: write_series_csv(series, fh))
    report = stdout if args.output is not None else stderr
    print(format_summary(summarize(series), model_r0(config.model, scenario.params)), file=report)
    return EXIT_OK


def cmd_batch(args, stdout: TextIO, stderr: TextIO) -> int:
    scenario = _load(args)
    config = SimulationConfig(args.model, args.days, args.seed, args.replicas)
    result: BatchResult = batch_simulate(scenario, config, workers=args.workers)
    _emit(args.output, stdout, lambda fh: write_series_csv(result.mean, fh, means=True))
    replica_path = args.replica_output
    if replica_path is None and args.output is not None:
        replica_path = args.output.with_name(args.output.stem + ".replicas.csv")
    if replica_path is not None:
        _emit(replica_path, stdout, lambda fh: write_replica_csv(result.summaries, fh))
    report = stdout if args.output is not None else stderr
    print(format_summary(summarize(result.mean), model_r0(config.model, scenario.params), means=True),
          file=report)
    return EXIT_OK


def cmd_village(args, stdout: TextIO, stderr: TextIO) -> int:
    scenario = village_preset(args.preset, seed=args.village_seed, site=args.initial_site or "hospital")
    save_scenario(scenario, args.output)
    print(f"wrote {scenario.cell_count}-cell scenario to {args.output}", file=stdout)
    return EXIT_OK


def cmd_validate(args, stdout: TextIO, stderr: TextIO) -> int:
    problems = validate(_load(args))
    if problems:
        raise ScenarioError(problems)
    print("ok", file=stdout)
    return EXIT_OK


def cmd_r0(args, stdout: TextIO, stderr: TextIO) -> int:
    family = args.model.lower().split("-")[0]
    if family not in ("sis", "sir"):
        print(f"cellepi r0: unknown model {args.model!r}; use sis or sir", file=stderr)
        return EXIT_USAGE
    if args.scenario is not None or args.preset is not None:
        base = _load(args).params
    else:
        base = DiseaseParams(beta=0.0, alpha=0.0)
    values = {k: getattr(args, k) for k in ("beta", "alpha", "mu", "theta") if getattr(args, k) is not None}
    params = DiseaseParams(**{**dict(beta=base.beta, alpha=base.alpha, mu=base.mu, theta=base.theta), **values})
    try:
        value = r0_sis(params) if family == "sis" else r0_sir(params)
    except ZeroDivisionError as exc:
        print(f"cellepi r0: {exc}", file=stderr)
        return EXIT_INVALID
    if not math.isfinite(value):
        print("cellepi r0: R0 is not finite", file=stderr)
        return EXIT_INVALID
    print(f"{value:.4f}", file=stdout)
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "batch": cmd_batch, "village": cmd_village,
            "validate": cmd_validate, "r0": cmd_r0}


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None,
         stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, stdout, stderr)
    except ScenarioError as exc:
        print("invalid scenario:", file=stderr)
        for v in exc.violations:
            print(f"  - {v}", file=stderr)
        return EXIT_INVALID
    except ConfigError as exc:
        print(f"cellepi: {exc}", file=stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cellepi: I/O error: {exc}", file=stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
