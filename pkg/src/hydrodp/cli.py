"""Command-line entry point.

Parameter precedence: command-line flags override the ``--config`` file,
which overrides the built-in reference-plant defaults.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .bench import SweepError, SweepSpec, emit_results, performance_ratio, run_sweep, summarize
from .config import ConfigError, PlantParams, load_config
from .engine import GridSpec, perfect_forecaster, run_hindsight, run_receding_horizon
from .flow import FlowDataError, build_mean_profile, read_flow_csv, write_flow_csv, write_profile_csv
from .synth import synth_flows

logger = logging.getLogger("hydrodp")


class CliError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _year_range(text: str) -> tuple[int, int]:
    try:
        lo, _, hi = text.partition(":")
        return int(lo), int(hi or lo)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected START:END years, got {text!r}") from None


def _common(p: argparse.ArgumentParser, data: bool = True):
    if data:
        p.add_argument("--flow-data", type=Path, required=True, help="flow CSV (date,flow_m3s)")
        p.add_argument("--config", type=Path, help="TOML file with [plant], [grid], [sweep]")
        p.add_argument("--history", type=_year_range, metavar="START:END",
                       help="years for the mean-flow profile (default: complete years before the first target year)")
        p.add_argument("--regime", choices=("dam", "ror"), default="dam")
        p.add_argument("--half-life", type=_floats, metavar="DAYS")
        p.add_argument("--forecast-days", type=_ints, metavar="M")
        p.add_argument("--dam-days", type=_floats, metavar="N")
        p.add_argument("--gamma", "--gammas", dest="gamma", type=_floats, metavar="GAMMA")
        p.add_argument("--coarse", action="store_true", help="quarter volume resolution")
    p.add_argument("--out", type=Path)
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hydrodp",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a flow CSV; optionally write the mean profile")
    p.add_argument("--flow-data", type=Path, required=True)
    p.add_argument("--history", type=_year_range, metavar="START:END")
    p.add_argument("--window", type=int, default=7)
    _common(p, data=False)

    p = sub.add_parser("optimize", help="hindsight and receding-horizon strategies for one year")
    _common(p)
    p.add_argument("--year", type=int, help="target year (default: last complete year)")

    p = sub.add_parser("simulate", help="receding-horizon strategy for one year")
    _common(p)
    p.add_argument("--year", type=int)

    p = sub.add_parser("sweep", help="performance ratios over a parameter grid")
    _common(p)
    p.add_argument("--years", type=_ints, help="comma-separated target years")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("synth", help="write deterministic synthetic flow data")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--years", type=int, default=43, help="number of years")
    p.add_argument("--start-year", type=int, default=1980)
    p.add_argument("--out", type=Path)
    p.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _load_years(path: Path):
    if not path.exists():
        raise CliError(f"flow data file not found: {path}")
    try:
        series = read_flow_csv(path)
    except FlowDataError as exc:
        raise CliError(f"{path}: {exc}") from None
    years = series.split_years()
    if not years:
        raise CliError(f"{path}: no complete calendar year of data")
    return series, years


def _profile(years: dict, history, first_target: int, window: int = 7):
    if history:
        lo, hi = history
        hist = [years[y] for y in range(lo, hi + 1) if y in years]
    else:
        hist = [v for y, v in sorted(years.items()) if y < first_target]
    if not hist:
        raise CliError("no history years available for the mean-flow profile")
    logger.info("mean profile from %d years", len(hist))
    return build_mean_profile(hist, window)


def _single(values, default, name):
    if values is None:
        return default
    if len(values) != 1:
        raise CliError(f"--{name} takes a single value for this command")
    return values[0]


def _settings(args):
    cfg = load_config(args.config) if args.config else {
        "plant": PlantParams(), "grid": GridSpec(), "sweep": {}}
    grid = cfg["grid"].coarse() if args.coarse else cfg["grid"]
    return cfg["plant"], grid, cfg["sweep"]


def _target_year(args, years):
    year = args.year if args.year is not None else max(years)
    if year not in years:
        raise CliError(f"no complete data for year {year}")
    return year


def _strategies(args, want_hindsight: bool):
    _, years = _load_years(args.flow_data)
    params, grid, _ = _settings(args)
    params = replace(
        params,
        gamma=_single(args.gamma, params.gamma, "gamma"),
        n_days_dam=_single(args.dam_days, params.n_days_dam, "dam-days"),
        half_life_days=_single(args.half_life, params.half_life_days, "half-life"),
        forecast_days=_single(args.forecast_days, params.forecast_days, "forecast-days"),
    )
    year = _target_year(args, years)
    profile = _profile(years, args.history, year)
    plant = params.plant(args.regime)
    prices = params.prices(grid)
    flows = years[year]
    M = params.forecast_days
    dpp = run_receding_horizon(
        flows, perfect_forecaster(flows, M) if M else None, plant, grid, prices,
        params.half_life_days, profile,
    )
    hind = run_hindsight(flows, plant, grid, prices) if want_hindsight else None
    return year, hind, dpp


def _write_record(record, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as fh:
        record.write(fh)
    logger.info("wrote %s", path)


def cmd_ingest(args) -> int:
    series, years = _load_years(args.flow_data)
    print(f"start={series.start_date} days={len(series)} complete_years={len(years)} "
          f"first={min(years)} last={max(years)}")
    if args.out:
        profile = _profile(years, args.history, max(years) + 1, args.window)
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with args.out.open("w") as fh:
            write_profile_csv(profile, fh)
    return 0


def cmd_optimize(args) -> int:
    year, hind, dpp = _strategies(args, want_hindsight=True)
    out = args.out or Path(".")
    _write_record(hind, out / f"hindsight_{year}.csv")
    _write_record(dpp, out / f"receding_{year}.csv")
    ratio = performance_ratio(dpp.total_profit, hind.total_profit)
    print(f"year={year} regime={args.regime} hindsight={hind.total_profit:.2f} "
          f"strategy={dpp.total_profit:.2f} ratio={ratio:.6f}")
    return 0


def cmd_simulate(args) -> int:
    year, _, dpp = _strategies(args, want_hindsight=False)
    _write_record(dpp, (args.out or Path(".")) / f"receding_{year}.csv")
    print(f"year={year} regime={args.regime} strategy={dpp.total_profit:.2f} "
          f"switches={dpp.n_switches}")
    return 0


def cmd_sweep(args) -> int:
    _, years = _load_years(args.flow_data)
    params, grid, sweep_cfg = _settings(args)
    target = args.years or sweep_cfg.get("years") or sorted(years)[-8:]
    try:
        spec = SweepSpec(
            years=tuple(target),
            forecast_days=tuple(args.forecast_days or sweep_cfg.get("forecast_days") or [params.forecast_days]),
            dam_days=tuple(args.dam_days or sweep_cfg.get("dam_days") or [params.n_days_dam]),
            gammas=tuple(args.gamma or sweep_cfg.get("gammas") or [params.gamma]),
            half_lives=tuple(args.half_life or sweep_cfg.get("half_lives") or [params.half_life_days]),
            regime=args.regime if args.regime != "dam" else sweep_cfg.get("regime", "dam"),
            grid=grid,
            plant=params,
        )
    except SweepError as exc:
        raise CliError(str(exc)) from None
    profile = _profile(years, args.history, min(spec.years))
    results = run_sweep(spec, years, profile, workers=args.workers)
    fmt = args.format or ("json" if args.out and args.out.suffix == ".json" else "csv")
    payload = emit_results(results, fmt)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_bytes(payload)
    else:
        sys.stdout.write(payload.decode())
    summary = summarize(results)
    print(f"cells={len(results)} mean_ratio={summary['all']['mean_ratio']:.6f}", file=sys.stderr)
    for axis in ("M", "N", "gamma", "half_life"):
        if len(summary[axis]) > 1:
            parts = " ".join(f"{k}:{v:.6f}" for k, v in summary[axis].items())
            print(f"mean_ratio_by_{axis} {parts}", file=sys.stderr)
    return 0


def cmd_synth(args) -> int:
    series = synth_flows(args.seed, args.years, args.start_year)
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        with args.out.open("w", newline="") as fh:
            write_flow_csv(series, fh)
    else:
        write_flow_csv(series, sys.stdout)
    return 0


COMMANDS = {
    "ingest": cmd_ingest,
    "optimize": cmd_optimize,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (CliError, ConfigError, SweepError, FlowDataError, ValueError) as exc:
        print(f"hydrodp: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
