"""Backward induction over (day, reservoir level, mode) and strategy replay.

Each solve uses one deterministic flow path, so flow is not a state
dimension. The dam state is the volume level; the run-of-river plant has a
single dummy level. Flows are rounded to the ``dq`` grid, volumes to the
nearest of ``volume_levels + 1`` evenly spaced levels (half-up).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import _kernel
from .flow import DAYS_PER_YEAR, FlowProjection, FlowSeries, MeanFlowProfile, project_flow, splice_forecast
from .plant import (
    G,
    JOULES_PER_KWH,
    RHO,
    DamPlantSpec,
    PriceSeries,
    RoRPlantSpec,
    efficiency,
    head_from_volume,
    mode_flows,
    payoff_dam,
    payoff_ror,
    step_reservoir,
    switch_cost_matrix,
)
from .records import StrategyRecord, SwitchEvent

logger = logging.getLogger(__name__)

Plant = DamPlantSpec | RoRPlantSpec
Forecaster = Callable[[int], Sequence[float]]


@dataclass(frozen=True)
class GridSpec:
    horizon: int = DAYS_PER_YEAR
    dq: float = 0.25
    volume_levels: int = 1000

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least one day")
        if self.dq <= 0:
            raise ValueError("dq must be positive")
        if self.volume_levels < 1:
            raise ValueError("volume_levels must be positive")

    def coarse(self) -> GridSpec:
        """Quarter volume resolution, for sweeps."""
        return replace(self, volume_levels=max(1, self.volume_levels // 4))


def flow_steps(flow, dq: float) -> np.ndarray:
    """Index of the nearest ``dq`` grid point (half-up)."""
    return np.floor(np.asarray(flow, dtype=float) / dq + 0.5).astype(np.int64)


def round_flow(flow, dq: float):
    return flow_steps(flow, dq) * dq


def snap_volume(volume, v_max: float, volume_levels: int) -> np.ndarray:
    """Nearest volume level (half-up), clipped to the grid."""
    dv = v_max / volume_levels
    level = np.floor(np.asarray(volume, dtype=float) / dv + 0.5).astype(np.int64)
    return np.clip(level, 0, volume_levels)


class _Bank:
    """Append-only stack of per-key 2-D blocks, addressed by integer index."""

    def __init__(self, make, shape, dtype):
        self._make = make
        self._index: dict = {}
        self._data = np.empty((4, *shape), dtype=dtype)

    def index(self, key) -> int:
        idx = self._index.get(key)
        if idx is None:
            idx = len(self._index)
            if idx == len(self._data):
                grown = np.empty((2 * idx, *self._data.shape[1:]), self._data.dtype)
                grown[:idx] = self._data
                self._data = grown
            self._data[idx] = self._make(key)
            self._index[key] = idx
        return idx

    @property
    def data(self) -> np.ndarray:
        return self._data[: len(self._index)]


class StageModel:
    """Per-day payoff and successor tables for one plant on one grid.

    Tables are cached by rounded flow and price, so repeated solves over
    overlapping paths (the receding-horizon loop) reuse them.
    """

    def __init__(self, plant: Plant, grid: GridSpec, costs: np.ndarray | None = None):
        self.plant = plant
        self.grid = grid
        self.regime = plant.regime
        self.n_modes = plant.n_modes
        if self.regime == "dam":
            res = plant.reservoir
            self.n_levels = grid.volume_levels + 1
            self.volumes = np.linspace(0.0, res.v_max, self.n_levels)
            self.heads = head_from_volume(self.volumes, res)
            self.turbine_flows = mode_flows(plant)
        else:
            self.n_levels = 1
            self.volumes = np.zeros(1)
            self.heads = np.full(1, plant.fixed_head)
            self.turbine_flows = None
        self.costs = switch_cost_matrix(plant) if costs is None else np.asarray(costs, float)
        if self.costs.shape != (self.n_modes, self.n_modes):
            raise ValueError("cost matrix does not match the number of modes")
        if np.any(np.diag(self.costs) != 0):
            raise ValueError("staying in a mode must be free")
        shape = (self.n_levels, self.n_modes)
        self._pay = _Bank(self._payoff_block, shape, float)
        self._succ = _Bank(self._succ_block, shape, np.int64)

    def _payoff_block(self, key):
        modes = np.arange(self.n_modes)
        if self.regime == "dam":
            return payoff_dam(modes[None, :], self.heads[:, None], key, self.plant)
        steps, price = key
        return payoff_ror(modes, steps * self.grid.dq, price, self.plant)[None, :]

    def _succ_block(self, steps):
        if self.regime == "ror":
            return np.zeros((1, self.n_modes), dtype=np.int64)
        new_volume, _ = step_reservoir(
            self.volumes[:, None], steps * self.grid.dq, self.turbine_flows[None, :],
            self.plant.reservoir,
        )
        return snap_volume(new_volume, self.plant.reservoir.v_max, self.grid.volume_levels)

    def stage_indices(self, steps: np.ndarray, prices: np.ndarray):
        if self.regime == "dam":
            pay = [self._pay.index(float(p)) for p in prices]
        else:
            pay = [self._pay.index((int(s), float(p))) for s, p in zip(steps, prices)]
        succ = [self._succ.index(int(s)) for s in steps]
        return np.array(pay, dtype=np.int64), np.array(succ, dtype=np.int64)

    @property
    def payoff_bank(self) -> np.ndarray:
        return self._pay.data

    @property
    def succ_bank(self) -> np.ndarray:
        return self._succ.data

    def payoff(self, steps: int, price: float) -> np.ndarray:
        key = float(price) if self.regime == "dam" else (int(steps), float(price))
        return self._pay.data[self._pay.index(key)]

    def successor(self, steps: int) -> np.ndarray:
        return self._succ.data[self._succ.index(int(steps))]


@dataclass(frozen=True)
class TerminalValuation:
    """End-of-horizon value per (volume level, mode)."""

    values: np.ndarray


def terminal_valuation(
    plant: Plant, grid: GridSpec, price: float = 1.0, costs: np.ndarray | None = None
) -> TerminalValuation:
    """Value of the water deficit relative to a full dam, plus the forced
    shutdown cost for ending in a productive mode.

    Missing water is priced as if it had run the turbine at design flow
    without running costs.
    """
    costs = switch_cost_matrix(plant) if costs is None else np.asarray(costs, float)
    closing = costs[:, 0]
    if plant.regime == "ror":
        return TerminalValuation(-closing[None, :].copy())
    res = plant.reservoir
    volumes = np.linspace(0.0, res.v_max, grid.volume_levels + 1)
    eta_d = float(efficiency(plant.efficiency.design_flow, plant.efficiency))
    # integral of the cone head from V to V_max
    head_integral = 0.75 * res.h_max * res.v_max * (1.0 - (volumes / res.v_max) ** (4.0 / 3.0))
    water = -price * eta_d * (RHO * G / JOULES_PER_KWH) * head_integral
    return TerminalValuation(water[:, None] - closing[None, :])


@dataclass(frozen=True)
class ValueTable:
    """Optimal continuation values and decisions from ``first_day`` on.

    ``values[k, level, mode]`` is the value on day ``first_day + k`` when
    arriving in ``mode``; ``policy`` holds the maximizing next mode.
    """

    values: np.ndarray
    policy: np.ndarray
    first_day: int
    flow_steps: np.ndarray
    pay_idx: np.ndarray
    succ_idx: np.ndarray
    model: StageModel

    @property
    def horizon(self) -> int:
        return self.policy.shape[0]

    def root_value(self, level: int | None = None, mode: int = 0) -> float:
        level = self.values.shape[1] - 1 if level is None else level
        return float(self.values[0, level, mode])

    def stage(self, k: int):
        """Payoff and successor tables used on table day ``k``."""
        return (self.model.payoff_bank[self.pay_idx[k]], self.model.succ_bank[self.succ_idx[k]])


def _path_values(flow_path) -> np.ndarray:
    if isinstance(flow_path, (FlowProjection, FlowSeries)):
        return np.asarray(flow_path.values, dtype=float)
    return np.asarray(flow_path, dtype=float)


def _prices(price: PriceSeries | None, first_day: int, n: int) -> np.ndarray:
    if price is None:
        return np.ones(n)
    if len(price.values) < first_day + n:
        raise ValueError(f"price series covers {len(price.values)} days, need {first_day + n}")
    return price.values[first_day : first_day + n]


def _prepare(flow_path, model: StageModel, grid: GridSpec, price, first_day: int):
    flows = _path_values(flow_path)
    n = grid.horizon - first_day
    if flows.shape != (n,):
        raise ValueError(
            f"flow path has {flows.size} days but the remaining horizon is {n} days"
        )
    steps = flow_steps(flows, grid.dq)
    pay_idx, succ_idx = model.stage_indices(steps, _prices(price, first_day, n))
    return steps, pay_idx, succ_idx


def solve(
    flow_path,
    plant: Plant,
    grid: GridSpec,
    price: PriceSeries | None = None,
    terminal: TerminalValuation | None = None,
    *,
    first_day: int = 0,
    costs: np.ndarray | None = None,
    model: StageModel | None = None,
) -> ValueTable:
    """Backward induction along a deterministic flow path.

    ``flow_path`` covers days ``first_day .. grid.horizon - 1``. For every
    day, level and incoming mode the table holds the best value over next
    modes of payoff minus switching cost plus the successor's value.
    """
    model = StageModel(plant, grid, costs) if model is None else model
    if terminal is None:
        terminal = terminal_valuation(plant, grid, costs=model.costs)
    steps, pay_idx, succ_idx = _prepare(flow_path, model, grid, price, first_day)
    values, policy = _kernel.backward_full(
        model.payoff_bank, pay_idx, model.succ_bank, succ_idx, model.costs,
        np.ascontiguousarray(terminal.values, dtype=float),
    )
    return ValueTable(values, policy, first_day, steps, pay_idx, succ_idx, model)


def decide(table: ValueTable, day: int, level: int, mode: int) -> int:
    """Best next mode on absolute ``day`` from (``level``, ``mode``)."""
    k = day - table.first_day
    if not 0 <= k < table.horizon:
        raise IndexError(f"day {day} outside the table ({table.first_day}..{table.first_day + table.horizon - 1})")
    if not 0 <= level < table.policy.shape[1]:
        raise IndexError(f"volume level {level} out of range")
    if not 0 <= mode < table.policy.shape[2]:
        raise IndexError(f"mode {mode} out of range")
    return int(table.policy[k, level, mode])


def _first_decision(model, grid, flow_path, price, terminal, first_day, level, mode) -> int:
    _, pay_idx, succ_idx = _prepare(flow_path, model, grid, price, first_day)
    _, policy = _kernel.backward_first(
        model.payoff_bank, pay_idx, model.succ_bank, succ_idx, model.costs, terminal
    )
    return int(policy[level, mode])


def _replay(actual, model: StageModel, grid: GridSpec, price, terminal: np.ndarray,
            choose: Callable[[int, int, int], int], start_level: int, start_mode: int,
            label: str) -> StrategyRecord:
    """Run ``choose(day, level, mode)`` against the realized flow."""
    plant = model.plant
    flows = _path_values(actual)
    if flows.shape != (grid.horizon,):
        raise ValueError(f"realized flow has {flows.size} days, horizon is {grid.horizon}")
    steps = flow_steps(flows, grid.dq)
    prices = _prices(price, 0, grid.horizon)
    T = grid.horizon

    modes = np.empty(T, dtype=int)
    payoffs = np.empty(T)
    levels = np.empty(T + 1, dtype=int)
    spills = np.zeros(T)
    turbine = np.zeros(T)
    switches: list[SwitchEvent] = []
    level, mode = start_level, start_mode
    levels[0] = level
    for t in range(T):
        j = choose(t, level, mode)
        if j != mode:
            switches.append(SwitchEvent(t, mode, j, float(model.costs[mode, j])))
        payoffs[t] = model.payoff(steps[t], prices[t])[level, j]
        if model.regime == "dam":
            turbine[t] = model.turbine_flows[j]
            _, spill = step_reservoir(model.volumes[level], steps[t] * grid.dq, turbine[t],
                                      plant.reservoir)
            spills[t] = float(spill)
            level = int(model.successor(steps[t])[level, j])
        else:
            turbine[t] = min(steps[t] * grid.dq, j * plant.f_max)
        modes[t] = j
        mode = j
        levels[t + 1] = level

    return StrategyRecord.build(
        label=label,
        regime=model.regime,
        modes=modes,
        switches=switches,
        payoffs=payoffs,
        inflows=steps * grid.dq,
        turbine_flows=turbine,
        volumes=model.volumes[levels],
        heads=model.heads[levels[:-1]],
        h_max=float(model.heads[-1]),
        spills=spills,
        terminal_adjustment=float(terminal[level, mode]),
    )


def _start(model: StageModel, start_level: int | None) -> int:
    return model.n_levels - 1 if start_level is None else start_level


def run_hindsight(
    actual: FlowSeries | np.ndarray,
    plant: Plant,
    grid: GridSpec = GridSpec(),
    price: PriceSeries | None = None,
    *,
    start_level: int | None = None,
    start_mode: int = 0,
    costs: np.ndarray | None = None,
) -> StrategyRecord:
    """Optimal strategy with the realized flow known in advance.

    Starts full and off by default.
    """
    model = StageModel(plant, grid, costs)
    term = terminal_valuation(plant, grid, costs=model.costs)
    table = solve(actual, plant, grid, price, term, model=model)
    return _replay(
        actual, model, grid, price, term.values,
        lambda t, lev, m: decide(table, t, lev, m),
        _start(model, start_level), start_mode, "hindsight",
    )


def perfect_forecaster(actual, M: int) -> Forecaster:
    """Forecasts equal to the realized flow, truncated at the year's end."""
    flows = _path_values(actual)

    def forecast(day: int) -> np.ndarray:
        return flows[day : day + M]

    return forecast


def run_receding_horizon(
    actual: FlowSeries | np.ndarray,
    forecaster: Forecaster | None,
    plant: Plant,
    grid: GridSpec,
    price: PriceSeries | None,
    half_life: float,
    profile: MeanFlowProfile,
    *,
    anchor_offset: int = 0,
    start_level: int | None = None,
    start_mode: int = 0,
    costs: np.ndarray | None = None,
) -> StrategyRecord:
    """Re-solve every day on the projected flow and act on the first decision.

    The projection on day ``t`` starts from the flow observed that day,
    takes the forecaster's days verbatim and reverts to ``profile`` after
    them. ``anchor_offset`` is the day-of-year of the horizon's first day.
    """
    model = StageModel(plant, grid, costs)
    term = terminal_valuation(plant, grid, costs=model.costs)
    term_values = np.ascontiguousarray(term.values)
    flows = _path_values(actual)
    T = grid.horizon

    def choose(t: int, level: int, mode: int) -> int:
        remaining = T - t
        projection = project_flow(profile, anchor_offset + t, flows[t], half_life, remaining)
        if forecaster is not None:
            forecast = np.asarray(forecaster(t), dtype=float)[:remaining]
            projection = splice_forecast(projection, forecast, len(forecast))
        return _first_decision(model, grid, projection, price, term_values, t, level, mode)

    record = _replay(actual, model, grid, price, term_values, choose,
                     _start(model, start_level), start_mode, "receding_horizon")
    logger.debug("receding horizon: %d switches, profit %.2f", len(record.switches), record.total_profit)
    return record
