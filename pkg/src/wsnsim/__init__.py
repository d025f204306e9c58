"""Round-based LEACH and MONCH wireless sensor network simulator."""

from .engine import SimulationResult, SimulationState, run_round, run_simulation
from .metrics import RoundMetrics, Summary, summarize
from .model import (
    ConfigError,
    FieldGeometry,
    Position,
    Protocol,
    RadioParams,
    SensorNode,
    SimConfig,
    deploy_nodes,
    load_config,
    make_rng,
    validate_config,
)

__all__ = [
    "ConfigError",
    "FieldGeometry",
    "Position",
    "Protocol",
    "RadioParams",
    "RoundMetrics",
    "SensorNode",
    "SimConfig",
    "SimulationResult",
    "SimulationState",
    "Summary",
    "deploy_nodes",
    "load_config",
    "make_rng",
    "run_round",
    "run_simulation",
    "summarize",
    "validate_config",
]
