"""River flow data, mean-flow profiles and deterministic flow projections.

Day indices run over a 365-day year (leap days dropped on ingestion), and
profiles are circular so that projections past Dec 31 wrap to Jan 1.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Sequence, TextIO

import numpy as np

DAYS_PER_YEAR = 365


class FlowDataError(ValueError):
    """Raised for malformed or inconsistent flow data."""


def _frozen(values: Iterable[float]) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


def _is_feb29(day: dt.date) -> bool:
    return day.month == 2 and day.day == 29


def next_day(day: dt.date) -> dt.date:
    """Following calendar day, skipping Feb 29."""
    nxt = day + dt.timedelta(days=1)
    if _is_feb29(nxt):
        nxt += dt.timedelta(days=1)
    return nxt


def day_of_year(day: dt.date) -> int:
    """0-based day index in a 365-day year (Feb 29 is not a valid input)."""
    if _is_feb29(day):
        raise ValueError(f"{day} is a leap day; leap days carry no day index")
    return (dt.date(2001, day.month, day.day) - dt.date(2001, 1, 1)).days


@dataclass(frozen=True)
class FlowSeries:
    """Gapless daily river flow in m³/s, starting at ``start_date``."""

    start_date: dt.date
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.ndim != 1 or len(self.values) < 1:
            raise FlowDataError("a flow series needs at least one value")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise FlowDataError("flows must be finite and non-negative")
        if _is_feb29(self.start_date):
            raise FlowDataError("a flow series cannot start on Feb 29")

    def __len__(self) -> int:
        return len(self.values)

    def dates(self) -> list[dt.date]:
        out = [self.start_date]
        for _ in range(len(self.values) - 1):
            out.append(next_day(out[-1]))
        return out

    def split_years(self) -> dict[int, FlowSeries]:
        """Complete calendar years contained in the series, keyed by year."""
        years: dict[int, list[float]] = {}
        for day, value in zip(self.dates(), self.values):
            years.setdefault(day.year, []).append(value)
        return {
            year: FlowSeries(dt.date(year, 1, 1), vals)
            for year, vals in years.items()
            if len(vals) == DAYS_PER_YEAR
        }


@dataclass(frozen=True)
class MeanFlowProfile:
    """Smoothed historical mean flow for each of the 365 days of the year."""

    values: np.ndarray
    window_days: int = 7

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        if self.values.shape != (DAYS_PER_YEAR,):
            raise FlowDataError(f"a mean profile has exactly {DAYS_PER_YEAR} entries")
        if np.any(self.values < 0):
            raise FlowDataError("mean flows must be non-negative")
        if self.window_days < 1:
            raise FlowDataError("window_days must be positive")

    def at(self, day: int | np.ndarray) -> float | np.ndarray:
        """Profile value(s) at day index(es), wrapping modulo 365."""
        return self.values[np.mod(day, DAYS_PER_YEAR)]


@dataclass(frozen=True)
class FlowProjection:
    """Projected daily flows for ``horizon_days`` days from ``anchor_day``."""

    anchor_day: int
    anchor_flow: float
    half_life: float
    values: np.ndarray
    profile: MeanFlowProfile

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))

    @property
    def horizon_days(self) -> int:
        return len(self.values)


def load_flow_csv(source: BinaryIO | TextIO | str | bytes) -> FlowSeries:
    """Parse a ``date,flow_m3s`` CSV into a gapless series.

    Rows dated Feb 29 are dropped. Malformed rows, negative flows, duplicated
    or out-of-order dates and gaps raise :class:`FlowDataError` naming the
    offending line.
    """
    if isinstance(source, bytes):
        text: TextIO = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        text = io.StringIO(source)
    elif isinstance(source, io.TextIOBase):
        text = source
    else:
        text = io.TextIOWrapper(source, encoding="utf-8", newline="")

    reader = csv.reader(text)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["date", "flow_m3s"]:
        raise FlowDataError("line 1: expected header 'date,flow_m3s'")

    start: dt.date | None = None
    last: dt.date | None = None
    seen: dt.date | None = None
    values: list[float] = []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise FlowDataError(f"line {lineno}: expected 2 fields, got {len(row)}")
        date_txt, flow_txt = row[0].strip(), row[1].strip()
        try:
            day = dt.date.fromisoformat(date_txt)
        except ValueError:
            raise FlowDataError(f"line {lineno}: bad date {date_txt!r}") from None
        try:
            flow = float(flow_txt)
        except ValueError:
            raise FlowDataError(f"line {lineno}: bad flow value {flow_txt!r}") from None
        if not np.isfinite(flow):
            raise FlowDataError(f"line {lineno}: non-finite flow value {flow_txt!r}")
        if flow < 0:
            raise FlowDataError(f"line {lineno}: negative flow value {flow_txt!r}")
        if seen is not None and day <= seen:
            kind = "duplicate" if day == seen else "out-of-order"
            raise FlowDataError(f"line {lineno}: {kind} date {day}")
        seen = day
        if _is_feb29(day):
            continue
        if last is not None and day != next_day(last):
            raise FlowDataError(f"line {lineno}: gap in dates between {last} and {day}")
        if start is None:
            start = day
        values.append(flow)
        last = day

    if start is None:
        raise FlowDataError("no flow rows found")
    return FlowSeries(start, values)


def read_flow_csv(path) -> FlowSeries:
    with open(path, "rb") as fh:
        return load_flow_csv(fh)


def write_flow_csv(series: FlowSeries, out: TextIO, decimals: int = 3) -> None:
    out.write("date,flow_m3s\n")
    for day, value in zip(series.dates(), series.values):
        out.write(f"{day.isoformat()},{value:.{decimals}f}\n")


def write_profile_csv(profile: MeanFlowProfile, out: TextIO) -> None:
    out.write("day_index,flow_m3s\n")
    for day, value in enumerate(profile.values):
        out.write(f"{day},{value:.6f}\n")


def read_profile_csv(source: TextIO) -> MeanFlowProfile:
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["day_index", "flow_m3s"]:
        raise FlowDataError("line 1: expected header 'day_index,flow_m3s'")
    values = np.full(DAYS_PER_YEAR, np.nan)
    for row in reader:
        if not row:
            continue
        try:
            values[int(row[0])] = float(row[1])
        except (ValueError, IndexError):
            raise FlowDataError(f"line {reader.line_num}: bad row {row!r}") from None
    if np.any(np.isnan(values)):
        raise FlowDataError("profile CSV must list all 365 day indices")
    return MeanFlowProfile(values)


def circular_moving_average(values: np.ndarray, window_days: int) -> np.ndarray:
    """Centred moving average with wrap-around at the array ends."""
    if window_days < 1 or window_days % 2 == 0:
        raise ValueError("window_days must be odd and >= 1")
    half = window_days // 2
    padded = np.concatenate([values[-half:], values, values[:half]]) if half else values
    kernel = np.full(window_days, 1.0 / window_days)
    return np.convolve(padded, kernel, mode="valid")


def build_mean_profile(
    histories: Sequence[FlowSeries], window_days: int = 7
) -> MeanFlowProfile:
    """Across-years mean flow per day of year, smoothed by a circular window."""
    if not histories:
        raise FlowDataError("no flow histories given")
    rows = []
    for series in histories:
        if len(series) % DAYS_PER_YEAR:
            raise FlowDataError(
                f"history starting {series.start_date} has {len(series)} days, "
                f"not a multiple of {DAYS_PER_YEAR}"
            )
        offset = day_of_year(series.start_date)
        for year in series.values.reshape(-1, DAYS_PER_YEAR):
            rows.append(np.roll(year, offset))
    daily_mean = np.mean(rows, axis=0)
    return MeanFlowProfile(circular_moving_average(daily_mean, window_days), window_days)


def _decay(deviation: float, elapsed: np.ndarray, half_life: float) -> np.ndarray:
    return deviation * np.exp2(-elapsed / half_life)


def project_flow(
    profile: MeanFlowProfile,
    anchor_day: int,
    anchor_flow: float,
    half_life: float,
    horizon: int,
) -> FlowProjection:
    """Mean-reverting projection: the deviation from the profile halves every
    ``half_life`` days."""
    if half_life <= 0:
        raise ValueError("half_life must be positive")
    if horizon < 1:
        raise ValueError("horizon must be at least one day")
    days = anchor_day + np.arange(horizon)
    deviation = anchor_flow - profile.at(anchor_day)
    values = _decay(deviation, np.arange(horizon, dtype=float), half_life) + profile.at(days)
    return FlowProjection(
        anchor_day, anchor_flow, half_life, np.maximum(values, 0.0), profile
    )


def splice_forecast(
    projection: FlowProjection,
    forecast: Sequence[float],
    M: int,
) -> FlowProjection:
    """Replace the first ``M`` projected days with a forecast.

    Past the forecast the deviation from the profile restarts at the last
    forecast value and keeps decaying with the projection's half-life.
    """
    if M < 0:
        raise ValueError("M must be non-negative")
    if len(forecast) < M:
        raise ValueError(f"forecast has {len(forecast)} days, fewer than M={M}")
    if M == 0:
        return projection
    horizon = projection.horizon_days
    profile = projection.profile
    used = min(M, horizon)
    values = np.array(projection.values)
    values[:used] = np.asarray(forecast[:used], dtype=float)
    if used < horizon:
        last = projection.anchor_day + used - 1
        deviation = values[used - 1] - profile.at(last)
        elapsed = np.arange(1, horizon - used + 1, dtype=float)
        tail_days = last + np.arange(1, horizon - used + 1)
        values[used:] = _decay(deviation, elapsed, projection.half_life) + profile.at(tail_days)
    return FlowProjection(
        projection.anchor_day,
        projection.anchor_flow,
        projection.half_life,
        np.maximum(values, 0.0),
        profile,
    )
