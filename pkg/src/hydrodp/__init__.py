"""Hydropower production scheduling by deterministic dynamic programming."""

from .bench import BenchResult, SweepSpec, emit_results, performance_ratio, run_sweep
from .config import PlantParams, load_config
from .engine import (
    GridSpec,
    StageModel,
    TerminalValuation,
    ValueTable,
    decide,
    perfect_forecaster,
    run_hindsight,
    run_receding_horizon,
    solve,
    terminal_valuation,
)
from .flow import (
    FlowProjection,
    FlowSeries,
    MeanFlowProfile,
    build_mean_profile,
    load_flow_csv,
    project_flow,
    splice_forecast,
)
from .plant import DamPlantSpec, EfficiencyParams, PriceSeries, ReservoirSpec, RoRPlantSpec
from .records import StrategyRecord, SwitchEvent

__version__ = "0.1.0"
