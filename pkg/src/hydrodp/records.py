"""Executed strategies and their line-oriented text format.

One row per day::

    day,mode,flow_used,inflow,volume,head,payoff,cumulative_profit

followed by ``#``-prefixed annotation rows for switch events, the terminal
adjustment and the total profit. Switch costs are charged on the day of
the switch, so the cumulative column already has them deducted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

COLUMNS = ("day", "mode", "flow_used", "inflow", "volume", "head", "payoff", "cumulative_profit")


@dataclass(frozen=True)
class SwitchEvent:
    day: int
    from_mode: int
    to_mode: int
    cost: float


@dataclass(frozen=True)
class StrategyRecord:
    label: str
    regime: str
    modes: np.ndarray
    switches: tuple[SwitchEvent, ...]
    payoffs: np.ndarray
    inflows: np.ndarray
    turbine_flows: np.ndarray
    volumes: np.ndarray  # start of each day, plus the end state
    heads: np.ndarray  # start of each day
    spills: np.ndarray
    h_max: float
    terminal_adjustment: float
    total_profit: float
    cumulative: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, *, switches, payoffs, terminal_adjustment, **kwargs) -> StrategyRecord:
        daily = np.array(payoffs, dtype=float)
        for ev in switches:
            daily[ev.day] -= ev.cost
        cumulative = np.cumsum(daily)
        total = float(cumulative[-1]) + terminal_adjustment if len(daily) else terminal_adjustment
        return cls(
            switches=tuple(switches),
            payoffs=np.asarray(payoffs, dtype=float),
            terminal_adjustment=terminal_adjustment,
            total_profit=total,
            cumulative=cumulative,
            **kwargs,
        )

    @property
    def n_switches(self) -> int:
        return len(self.switches)

    @property
    def switch_cost_total(self) -> float:
        return sum(ev.cost for ev in self.switches)

    @property
    def mean_head_fraction(self) -> float:
        return float(np.mean(self.heads) / self.h_max)

    @property
    def spill_total(self) -> float:
        return float(np.sum(self.spills))

    def same_events(self, other: StrategyRecord) -> bool:
        """Identical daily modes, switch events and reservoir path."""
        return (
            np.array_equal(self.modes, other.modes)
            and self.switches == other.switches
            and np.array_equal(self.volumes, other.volumes)
        )

    def write(self, out: TextIO) -> None:
        out.write(f"# strategy={self.label} regime={self.regime}\n")
        out.write(",".join(COLUMNS) + "\n")
        for t in range(len(self.modes)):
            out.write(
                f"{t},{self.modes[t]},{self.turbine_flows[t]:.6g},{self.inflows[t]:.6g},"
                f"{self.volumes[t]:.6f},{self.heads[t]:.6f},{self.payoffs[t]:.6f},"
                f"{self.cumulative[t]:.6f}\n"
            )
        for ev in self.switches:
            out.write(f"# switch,{ev.day},{ev.from_mode},{ev.to_mode},{ev.cost:.6f}\n")
        out.write(f"# final_volume,{self.volumes[-1]:.6f}\n")
        out.write(f"# terminal_adjustment,{self.terminal_adjustment:.6f}\n")
        out.write(f"# total_profit,{self.total_profit:.6f}\n")


def read_record_rows(source: TextIO) -> dict:
    """Parse a record file back into columns and annotations."""
    rows: list[list[str]] = []
    switches: list[SwitchEvent] = []
    meta: dict[str, str] = {}
    extra: dict[str, float] = {}
    header_seen = False
    for line in source:
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("switch,"):
                _, day, i, j, cost = body.split(",")
                switches.append(SwitchEvent(int(day), int(i), int(j), float(cost)))
            elif "," in body:
                key, value = body.split(",", 1)
                extra[key] = float(value)
            else:
                for part in body.split():
                    key, _, value = part.partition("=")
                    meta[key] = value
            continue
        if not header_seen:
            if tuple(line.split(",")) != COLUMNS:
                raise ValueError(f"unexpected record header {line!r}")
            header_seen = True
            continue
        rows.append(line.split(","))
    cols = {name: np.array([r[k] for r in rows], dtype=float) for k, name in enumerate(COLUMNS)}
    cols["day"] = cols["day"].astype(int)
    cols["mode"] = cols["mode"].astype(int)
    return {"columns": cols, "switches": switches, "meta": meta, **extra}
