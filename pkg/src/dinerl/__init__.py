"""Decomposed deep RL autoscaling testbed with live decision explanations."""

from .agent import AgentHyper, ChannelSpec, DecomposedAgent, aggregate_q, greedy_action
from .config import ModelSchedule, RunConfig, apply_overrides, load_config
from .dine import (
    DineThresholds,
    ImportantInteraction,
    RewardChannelDominance,
    RewardChannelExtremum,
    detect_extrema,
    detect_important_interactions,
    gini,
    minimal_sufficient_explanation,
    reward_channel_dominance,
)
from .envmodel import EnvModel
from .errors import (
    ConfigurationError,
    DataError,
    DimensionError,
    EpisodeEnd,
    NotReadyError,
    UndefinedInputError,
)
from .replay import ReplayMemory, Transition
from .runtime import ControlLoop, RunSummary, StepRecord, zscore_series
from .server import TelemetryServer, TraceReplayer, read_trace
from .swimsim import Action, SimConfig, SwimSim, WorkloadSpec, generate_workload

__version__ = "0.1.0"

__all__ = [
    "Action",
    "AgentHyper",
    "ChannelSpec",
    "ConfigurationError",
    "ControlLoop",
    "DataError",
    "DecomposedAgent",
    "DimensionError",
    "DineThresholds",
    "EnvModel",
    "EpisodeEnd",
    "ImportantInteraction",
    "ModelSchedule",
    "NotReadyError",
    "ReplayMemory",
    "RewardChannelDominance",
    "RewardChannelExtremum",
    "RunConfig",
    "RunSummary",
    "StepRecord",
    "SwimSim",
    "SimConfig",
    "TelemetryServer",
    "TraceReplayer",
    "Transition",
    "UndefinedInputError",
    "WorkloadSpec",
    "aggregate_q",
    "apply_overrides",
    "detect_extrema",
    "detect_important_interactions",
    "generate_workload",
    "gini",
    "greedy_action",
    "load_config",
    "minimal_sufficient_explanation",
    "read_trace",
    "reward_channel_dominance",
    "zscore_series",
    "__version__",
]
