"""Physics and economics of the dam plant and the run-of-river plant.

Power is rho*g*H*eta*F in watts, reported in kW so that a price in
m.u./kWh yields m.u./h. Decisions are daily, so payoffs returned here are
per day (24 x the hourly rate). Default values follow the reference plant:
alpha=0.92, beta=0.45, F_d=10, F_min=5, F_max=13 m³/s, H_max=5 m,
c_run=100 and c_low=1000 m.u./h.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

RHO = 1000.0  # kg/m³
G = 9.82  # m/s²
SECONDS_PER_DAY = 86400.0
HOURS_PER_DAY = 24.0
DAYS_PER_YEAR = 365
JOULES_PER_KWH = 3.6e6

Regime = Literal["dam", "ror"]

# switching from/to "off" in the dam plant costs this many times a mode adjustment
ON_OFF_FACTOR = 25.0


@dataclass(frozen=True)
class EfficiencyParams:
    alpha: float = 0.92
    beta: float = 0.45
    design_flow: float = 10.0

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if self.design_flow <= 0:
            raise ValueError(f"design_flow must be positive, got {self.design_flow}")


@dataclass(frozen=True)
class ReservoirSpec:
    """Cone-shaped reservoir: head grows with the cube root of stored volume."""

    h_max: float = 5.0
    v_max: float = 10.0 * SECONDS_PER_DAY * 30

    def __post_init__(self):
        if self.h_max <= 0 or self.v_max <= 0:
            raise ValueError("h_max and v_max must be positive")

    @classmethod
    def from_dam_days(cls, design_flow: float, n_days: float, h_max: float = 5.0):
        """Reservoir holding ``n_days`` of water at the design flow."""
        return cls(h_max=h_max, v_max=design_flow * SECONDS_PER_DAY * n_days)

    def dam_days(self, design_flow: float) -> float:
        return self.v_max / (design_flow * SECONDS_PER_DAY)


@dataclass(frozen=True)
class DamPlantSpec:
    """Single continuously adjustable unit behind a dam.

    Mode 0 is off; modes 1..n_modes-1 run at flows spaced evenly from
    ``f_min`` to ``f_max``.
    """

    efficiency: EfficiencyParams = field(default_factory=EfficiencyParams)
    reservoir: ReservoirSpec = field(default_factory=ReservoirSpec)
    f_min: float = 5.0
    f_max: float = 13.0
    c_run: float = 100.0
    c_low: float = 1000.0
    gamma: float = 0.0025
    n_modes: int = 12

    regime = "dam"

    def __post_init__(self):
        fd = self.efficiency.design_flow
        if not 0 < self.f_min <= fd <= self.f_max:
            raise ValueError("need 0 < f_min <= design_flow <= f_max")
        if not 0 <= self.gamma <= 0.01:
            raise ValueError(f"gamma must lie in [0, 0.01], got {self.gamma}")
        if self.c_run < 0 or self.c_low < 0:
            raise ValueError("running costs must be non-negative")
        if self.n_modes < 3:
            raise ValueError("a dam plant needs at least two productive modes")

    @classmethod
    def with_dam_days(cls, n_days: float, **kwargs) -> DamPlantSpec:
        eff = kwargs.pop("efficiency", EfficiencyParams())
        h_max = kwargs.pop("h_max", 5.0)
        res = ReservoirSpec.from_dam_days(eff.design_flow, n_days, h_max)
        return cls(efficiency=eff, reservoir=res, **kwargs)


@dataclass(frozen=True)
class RoRPlantSpec:
    """Two identical units without storage; the river flow passes the plant.

    Modes: 0 off, 1 one unit running, 2 both units sharing the flow.
    """

    efficiency: EfficiencyParams = field(default_factory=EfficiencyParams)
    fixed_head: float = 5.0
    f_min: float = 5.0
    f_max: float = 13.0
    c_run: float = 100.0
    c_low: float = 1000.0
    gamma: float = 0.0025
    split_grid: int = 100

    regime = "ror"
    n_modes = 3

    def __post_init__(self):
        if self.fixed_head <= 0:
            raise ValueError("fixed_head must be positive")
        if not 0 < self.f_min <= self.efficiency.design_flow <= self.f_max:
            raise ValueError("need 0 < f_min <= design_flow <= f_max")
        if not 0 <= self.gamma <= 0.01:
            raise ValueError(f"gamma must lie in [0, 0.01], got {self.gamma}")
        if self.c_run < 0 or self.c_low < 0:
            raise ValueError("running costs must be non-negative")
        if self.split_grid < 1:
            raise ValueError("split_grid must be positive")


@dataclass(frozen=True)
class PriceSeries:
    """Daily electricity price in m.u./kWh."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or len(arr) == 0 or np.any(arr < 0):
            raise ValueError("prices must be a non-empty list of non-negative values")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @classmethod
    def constant(cls, n_days: int = DAYS_PER_YEAR, price: float = 1.0) -> PriceSeries:
        return cls(np.full(n_days, price))

    def __len__(self) -> int:
        return len(self.values)


def efficiency(flow, params: EfficiencyParams):
    """Turbine efficiency, peaking at ``alpha`` for the design flow.

    Not clamped: far from the design flow it can fall below zero.
    """
    return params.alpha - params.beta * (np.asarray(flow) / params.design_flow - 1.0) ** 2


def mode_flows(spec: DamPlantSpec) -> np.ndarray:
    """Turbine flow per dam mode, mode 0 being zero."""
    steps = spec.n_modes - 2
    i = np.arange(1, spec.n_modes)
    flows = spec.f_min + (i - 1) / steps * (spec.f_max - spec.f_min)
    return np.concatenate([[0.0], flows])


def mode_flow(mode: int, spec: DamPlantSpec) -> float:
    if not 0 <= mode < spec.n_modes:
        raise ValueError(f"mode {mode} outside 0..{spec.n_modes - 1}")
    return float(mode_flows(spec)[mode])


def head_from_volume(volume, reservoir: ReservoirSpec):
    vol = np.asarray(volume, dtype=float)
    if np.any(vol < 0) or np.any(vol > reservoir.v_max):
        raise ValueError(f"volume outside [0, {reservoir.v_max}]")
    return reservoir.h_max * np.cbrt(vol / reservoir.v_max)


def volume_from_head(head, reservoir: ReservoirSpec):
    return reservoir.v_max * (np.asarray(head, dtype=float) / reservoir.h_max) ** 3


def step_reservoir(volume, inflow, outflow, reservoir: ReservoirSpec, dt: float = 1.0):
    """One explicit water-balance step over ``dt`` days.

    Returns ``(new_volume, spill)`` in m³. Volume is clamped to
    [0, v_max]; the excess above v_max is spilled.
    """
    raw = np.asarray(volume, dtype=float) + (
        np.asarray(inflow, dtype=float) - np.asarray(outflow, dtype=float)
    ) * (SECONDS_PER_DAY * dt)
    new_volume = np.clip(raw, 0.0, reservoir.v_max)
    spill = np.maximum(raw - reservoir.v_max, 0.0)
    return new_volume, spill


def _check_mode(mode, n_modes: int):
    m = np.asarray(mode)
    if np.any(m < 0) or np.any(m >= n_modes):
        raise ValueError(f"mode outside 0..{n_modes - 1}")
    return m


def running_payoff_dam(flow, head, price, spec: DamPlantSpec):
    """Daily payoff of the running unit at turbine ``flow``.

    Running with an empty dam (head 0) costs ``c_run + c_low`` per hour.
    """
    h = np.asarray(head, dtype=float)
    power_kw = RHO * G * h * efficiency(flow, spec.efficiency) * flow / 1000.0
    running = HOURS_PER_DAY * (power_kw * np.asarray(price, dtype=float) - spec.c_run)
    empty = HOURS_PER_DAY * (-spec.c_run - spec.c_low)
    return np.where(h > 0, running, empty)


def payoff_dam(mode, head, price, spec: DamPlantSpec):
    """Daily payoff of the dam plant in ``mode`` at start-of-day ``head``."""
    m = _check_mode(mode, spec.n_modes)
    running = running_payoff_dam(mode_flows(spec)[m], head, price, spec)
    out = np.where(m == 0, 0.0, running)
    return out if out.ndim else float(out)


def unit_payoff_ror(flow, price, spec: RoRPlantSpec):
    """Hourly payoff of one RoR unit fed with ``flow``."""
    f = np.asarray(flow, dtype=float)
    c = RHO * G * spec.fixed_head / 1000.0
    used = np.minimum(f, spec.f_max)
    producing = c * efficiency(used, spec.efficiency) * used * np.asarray(price, dtype=float)
    return -spec.c_run + np.where(f < spec.f_min, -spec.c_low, producing)


def split_payoff_ror(flow, price, spec: RoRPlantSpec):
    """Hourly payoff of both units with the best split of ``flow`` over a
    uniform grid of ``split_grid + 1`` fractions."""
    f = np.asarray(flow, dtype=float)
    delta = np.linspace(0.0, 1.0, spec.split_grid + 1)
    first = unit_payoff_ror(np.multiply.outer(f, delta), price, spec)
    second = unit_payoff_ror(np.multiply.outer(f, 1.0 - delta), price, spec)
    return np.max(first + second, axis=-1)


def payoff_ror(mode, flow, price, spec: RoRPlantSpec):
    """Daily payoff of the run-of-river plant."""
    m = _check_mode(mode, 3)
    one = unit_payoff_ror(flow, price, spec)
    two = split_payoff_ror(flow, price, spec)
    out = HOURS_PER_DAY * np.where(m == 0, 0.0, np.where(m == 1, one, two))
    return out if out.ndim else float(out)


def switch_cost(from_mode: int, to_mode: int, regime: Regime, gamma: float, d_ref: float,
                n_modes: int | None = None) -> float:
    if regime == "dam":
        n = 12 if n_modes is None else n_modes
    elif regime == "ror":
        n = 3
    else:
        raise ValueError(f"unknown regime {regime!r}")
    if not (0 <= from_mode < n and 0 <= to_mode < n):
        raise ValueError(f"invalid mode pair ({from_mode}, {to_mode}) for {regime}")
    if from_mode == to_mode:
        return 0.0
    if regime == "dam":
        if from_mode == 0 or to_mode == 0:
            return gamma * d_ref
        return gamma * d_ref / ON_OFF_FACTOR
    return gamma * d_ref if abs(from_mode - to_mode) == 1 else 1.5 * gamma * d_ref


def reference_profit(spec: DamPlantSpec | RoRPlantSpec) -> float:
    """Profit of a year at full capacity, full head and unit price.

    Switching costs are quoted as fractions ``gamma`` of this figure.
    """
    head = spec.reservoir.h_max if isinstance(spec, DamPlantSpec) else spec.fixed_head
    f = spec.f_max
    hourly = RHO * G * head * float(efficiency(f, spec.efficiency)) * f / 1000.0 - spec.c_run
    return DAYS_PER_YEAR * HOURS_PER_DAY * hourly


def switch_cost_matrix(spec: DamPlantSpec | RoRPlantSpec) -> np.ndarray:
    d_ref = reference_profit(spec)
    n = spec.n_modes
    return np.array(
        [[switch_cost(i, j, spec.regime, spec.gamma, d_ref, n) for j in range(n)] for i in range(n)]
    )
