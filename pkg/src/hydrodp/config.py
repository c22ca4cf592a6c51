"""Plant, grid and sweep parameters from a TOML file.

Example::

    [plant]
    alpha = 0.92
    gamma = 0.0025
    n_days_dam = 30

    [grid]
    volume_levels = 1000

    [sweep]
    years = [2015, 2016]
    gammas = [0.00125, 0.0025, 0.005]

Keys of the ``[plant]`` table may also appear at top level.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .engine import GridSpec
from .plant import DamPlantSpec, EfficiencyParams, PriceSeries, RoRPlantSpec


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PlantParams:
    alpha: float = 0.92
    beta: float = 0.45
    f_min: float = 5.0
    f_max: float = 13.0
    f_d: float = 10.0
    h_max: float = 5.0
    c_run: float = 100.0
    c_low: float = 1000.0
    gamma: float = 0.0025
    n_days_dam: float = 30.0
    half_life_days: float = 10.0
    forecast_days: int = 10
    price: float = 1.0

    def __post_init__(self):
        if not 0 <= self.gamma <= 0.01:
            raise ConfigError(f"gamma must lie in [0, 0.01], got {self.gamma}")
        if self.n_days_dam <= 0:
            raise ConfigError("n_days_dam must be positive")
        if self.half_life_days <= 0:
            raise ConfigError("half_life_days must be positive")
        if self.forecast_days < 0:
            raise ConfigError("forecast_days must be non-negative")
        if self.price < 0:
            raise ConfigError("price must be non-negative")

    @property
    def efficiency(self) -> EfficiencyParams:
        return EfficiencyParams(self.alpha, self.beta, self.f_d)

    def dam_plant(self, n_days: float | None = None, gamma: float | None = None) -> DamPlantSpec:
        return DamPlantSpec.with_dam_days(
            self.n_days_dam if n_days is None else n_days,
            efficiency=self.efficiency,
            h_max=self.h_max,
            f_min=self.f_min,
            f_max=self.f_max,
            c_run=self.c_run,
            c_low=self.c_low,
            gamma=self.gamma if gamma is None else gamma,
        )

    def ror_plant(self, gamma: float | None = None) -> RoRPlantSpec:
        return RoRPlantSpec(
            efficiency=self.efficiency,
            fixed_head=self.h_max,
            f_min=self.f_min,
            f_max=self.f_max,
            c_run=self.c_run,
            c_low=self.c_low,
            gamma=self.gamma if gamma is None else gamma,
        )

    def plant(self, regime: str):
        return self.ror_plant() if regime == "ror" else self.dam_plant()

    def prices(self, grid: GridSpec) -> PriceSeries:
        return PriceSeries.constant(grid.horizon, self.price)


_PLANT_KEYS = {f.name for f in fields(PlantParams)}
_GRID_KEYS = {f.name for f in fields(GridSpec)}
_SWEEP_KEYS = {"years", "forecast_days", "dam_days", "gammas", "half_lives", "regime"}


def _check_keys(table: dict, allowed: set, where: str):
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {sorted(unknown)}")


def load_config(path) -> dict:
    """Parsed sections: ``plant`` (PlantParams), ``grid`` (GridSpec), ``sweep`` (dict)."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(raw)


def parse_config(raw: dict) -> dict:
    raw = dict(raw)
    plant = dict(raw.pop("plant", {}))
    grid = raw.pop("grid", {})
    sweep = raw.pop("sweep", {})
    plant.update(raw)  # remaining top-level keys are plant keys
    _check_keys(plant, _PLANT_KEYS, "[plant]")
    _check_keys(grid, _GRID_KEYS, "[grid]")
    _check_keys(sweep, _SWEEP_KEYS, "[sweep]")
    try:
        return {
            "plant": replace(PlantParams(), **plant),
            "grid": replace(GridSpec(), **grid),
            "sweep": dict(sweep),
        }
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
