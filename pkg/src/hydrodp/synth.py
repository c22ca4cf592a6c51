"""Synthetic daily river flow with a snowmelt-dominated annual cycle.

Stand-in for gauged data in tests and demos: low winter base flow, a large
spring flood and a smaller autumn peak. Each year draws its own flood
timing and size, an overall wetness factor and AR(1) log-noise.
"""

from __future__ import annotations

import datetime as dt

import numpy as np

from .flow import DAYS_PER_YEAR, FlowSeries

BASE_FLOW = 3.0
SPRING_PEAK, SPRING_DAY, SPRING_WIDTH = 32.0, 130.0, 14.0
AUTUMN_PEAK, AUTUMN_DAY, AUTUMN_WIDTH = 7.0, 285.0, 22.0


def base_profile() -> np.ndarray:
    d = np.arange(DAYS_PER_YEAR, dtype=float)
    spring = SPRING_PEAK * np.exp(-0.5 * ((d - SPRING_DAY) / SPRING_WIDTH) ** 2)
    autumn = AUTUMN_PEAK * np.exp(-0.5 * ((d - AUTUMN_DAY) / AUTUMN_WIDTH) ** 2)
    return BASE_FLOW + spring + autumn


def synth_year(rng: np.random.Generator) -> np.ndarray:
    d = np.arange(DAYS_PER_YEAR, dtype=float)
    shift = rng.normal(0.0, 8.0)
    flood = SPRING_PEAK * rng.lognormal(0.0, 0.3)
    width = SPRING_WIDTH * rng.uniform(0.75, 1.3)
    autumn = AUTUMN_PEAK * rng.lognormal(0.0, 0.5)
    autumn_day = AUTUMN_DAY + rng.normal(0.0, 15.0)
    wetness = rng.lognormal(0.0, 0.15)
    flows = wetness * (
        BASE_FLOW
        + flood * np.exp(-0.5 * ((d - SPRING_DAY - shift) / width) ** 2)
        + autumn * np.exp(-0.5 * ((d - autumn_day) / AUTUMN_WIDTH) ** 2)
    )
    noise = np.empty(DAYS_PER_YEAR)
    noise[0] = rng.normal(0.0, 0.2)
    for t in range(1, DAYS_PER_YEAR):
        noise[t] = 0.9 * noise[t - 1] + rng.normal(0.0, 0.2 * np.sqrt(1 - 0.81))
    return flows * np.exp(noise)


def synth_flows(seed: int, n_years: int, start_year: int = 1980) -> FlowSeries:
    """``n_years`` consecutive 365-day years starting Jan 1 of ``start_year``.

    Deterministic in ``seed``; values are rounded to 3 decimals so a CSV
    round trip is lossless.
    """
    if n_years < 1:
        raise ValueError("n_years must be positive")
    rng = np.random.default_rng(seed)
    values = np.concatenate([synth_year(rng) for _ in range(n_years)])
    return FlowSeries(dt.date(start_year, 1, 1), np.round(values, 3))
