"""Parameter sweeps comparing receding-horizon strategies with hindsight.

Each cell of the sweep is one (year, forecast length M, dam size N,
switching-cost fraction gamma, half-life) combination; the hindsight
optimum only depends on (year, N, gamma) and is shared between cells.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .config import PlantParams
from .engine import GridSpec, perfect_forecaster, run_hindsight, run_receding_horizon
from .flow import FlowSeries, MeanFlowProfile
from .records import StrategyRecord

logger = logging.getLogger(__name__)

RATIO_SLACK = 1e-9

RESULT_FIELDS = (
    "year", "M", "N", "gamma", "half_life",
    "hindsight_profit", "strategy_profit", "ratio",
    "switches_opt", "switches_dpp", "mean_head_frac", "spill_total",
)


class SweepError(ValueError):
    pass


def performance_ratio(strategy_profit: float, hindsight_profit: float) -> float:
    """Share of the hindsight optimum earned by a strategy."""
    if not hindsight_profit > 0:
        raise SweepError(f"hindsight profit {hindsight_profit} is not positive; ratio undefined")
    return strategy_profit / hindsight_profit


def _axis(values: Iterable, name: str) -> tuple:
    vals = tuple(sorted(set(values)))
    if not vals:
        raise SweepError(f"sweep axis {name!r} is empty")
    return vals


@dataclass(frozen=True)
class SweepSpec:
    years: tuple[int, ...]
    forecast_days: tuple[int, ...] = (10,)
    dam_days: tuple[float, ...] = (30.0,)
    gammas: tuple[float, ...] = (0.0025,)
    half_lives: tuple[float, ...] = (10.0,)
    regime: str = "dam"
    grid: GridSpec = field(default_factory=GridSpec)
    plant: PlantParams = field(default_factory=PlantParams)

    def __post_init__(self):
        if self.regime not in ("dam", "ror"):
            raise SweepError(f"unknown regime {self.regime!r}")
        for name in ("years", "forecast_days", "dam_days", "gammas", "half_lives"):
            object.__setattr__(self, name, _axis(getattr(self, name), name))
        if any(not 0 <= g <= 0.01 for g in self.gammas):
            raise SweepError("gamma values must lie in [0, 0.01]")
        if any(m < 0 for m in self.forecast_days):
            raise SweepError("forecast lengths must be non-negative")
        if any(n <= 0 for n in self.dam_days):
            raise SweepError("dam sizes must be positive")
        if any(h <= 0 for h in self.half_lives):
            raise SweepError("half-lives must be positive")
        if self.regime == "ror":
            # no storage: the dam-size axis is meaningless
            object.__setattr__(self, "dam_days", (0.0,))

    def cells(self):
        return product(self.years, self.forecast_days, self.dam_days, self.gammas, self.half_lives)


@dataclass(frozen=True)
class BenchResult:
    year: int
    M: int
    N: float
    gamma: float
    half_life: float
    hindsight_profit: float
    strategy_profit: float
    ratio: float
    switches_opt: int
    switches_dpp: int
    mean_head_frac: float
    spill_total: float


def _plant(spec: SweepSpec, N: float, gamma: float):
    if spec.regime == "ror":
        return spec.plant.ror_plant(gamma=gamma)
    return spec.plant.dam_plant(n_days=N, gamma=gamma)


def _hindsight(spec: SweepSpec, flows: FlowSeries, N: float, gamma: float) -> StrategyRecord:
    return run_hindsight(flows, _plant(spec, N, gamma), spec.grid, spec.plant.prices(spec.grid))


def _cell(spec, flows, profile, year, M, N, gamma, half_life, hindsight) -> BenchResult:
    plant = _plant(spec, N, gamma)
    strategy = run_receding_horizon(
        flows, perfect_forecaster(flows, M) if M else None, plant, spec.grid,
        spec.plant.prices(spec.grid), half_life, profile,
    )
    ratio = performance_ratio(strategy.total_profit, hindsight.total_profit)
    if ratio > 1 + RATIO_SLACK:
        logger.warning("cell %s: ratio %.12f exceeds 1; hindsight dominance violated",
                       (year, M, N, gamma, half_life), ratio)
    return BenchResult(
        year=year, M=M, N=N, gamma=gamma, half_life=half_life,
        hindsight_profit=hindsight.total_profit,
        strategy_profit=strategy.total_profit,
        ratio=ratio,
        switches_opt=hindsight.n_switches,
        switches_dpp=strategy.n_switches,
        mean_head_frac=strategy.mean_head_fraction,
        spill_total=strategy.spill_total,
    )


def _year_cells(spec: SweepSpec, year: int, flows: FlowSeries, profile) -> list[BenchResult]:
    hindsight: dict = {}
    out = []
    for _, M, N, gamma, half_life in product(
        (year,), spec.forecast_days, spec.dam_days, spec.gammas, spec.half_lives
    ):
        if (N, gamma) not in hindsight:
            hindsight[N, gamma] = _hindsight(spec, flows, N, gamma)
        out.append(_cell(spec, flows, profile, year, M, N, gamma, half_life, hindsight[N, gamma]))
    return out


def run_sweep(
    spec: SweepSpec,
    data: Mapping[int, FlowSeries],
    profile: MeanFlowProfile,
    workers: int = 1,
) -> list[BenchResult]:
    """Evaluate every cell of the sweep, ordered by cell coordinates.

    ``data`` maps each requested year to its 365 days of realized flow;
    ``profile`` is the historical mean flow used by the projections.
    """
    missing = [y for y in spec.years if y not in data]
    if missing:
        raise SweepError(f"no flow data for year(s) {missing}")
    for y in spec.years:
        if len(data[y]) != spec.grid.horizon:
            raise SweepError(f"year {y} has {len(data[y])} days, horizon is {spec.grid.horizon}")
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = pool.map(_year_cells, *zip(*[(spec, y, data[y], profile) for y in spec.years]))
            results = [r for chunk in chunks for r in chunk]
    else:
        results = [r for y in spec.years for r in _year_cells(spec, y, data[y], profile)]
    return sorted(results, key=lambda r: (r.year, r.M, r.N, r.gamma, r.half_life))


def emit_results(results: Sequence[BenchResult], format: str = "csv") -> bytes:
    if not results:
        raise SweepError("no results to emit")
    rows = [{k: asdict(r)[k] for k in RESULT_FIELDS} for r in results]
    if format == "json":
        return (json.dumps(rows, indent=2) + "\n").encode()
    if format != "csv":
        raise SweepError(f"unknown format {format!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULT_FIELDS)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row.values()])
    return buf.getvalue().encode()


def summarize(results: Sequence[BenchResult]) -> dict[str, dict]:
    """Mean ratio per value of each sweep axis, plus the overall mean."""
    out: dict[str, dict] = {"all": {"mean_ratio": float(np.mean([r.ratio for r in results]))}}
    for axis in ("year", "M", "N", "gamma", "half_life"):
        groups: dict = {}
        for r in results:
            groups.setdefault(getattr(r, axis), []).append(r.ratio)
        out[axis] = {k: float(np.mean(v)) for k, v in sorted(groups.items())}
    return out
