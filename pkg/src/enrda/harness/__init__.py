"""Configuration-driven experiment runner, metrics, and CLI."""

from .config import (
    OUTPUT_DIR_ENV,
    SCHEMA_VERSION,
    ConfigError,
    ExperimentConfig,
    from_dict,
    load,
    dump,
    to_dict,
    validate,
)
from .demo import write_ot_demo
from .metrics import BIAS_MODES, MetricSeries, compute_metrics
from .presets import PRESET_NAMES, build_preset
from .runner import (
    ARTIFACT_SCHEMA_VERSION,
    ReplicateResult,
    aggregate_summary,
    derive_seed,
    run_experiment,
    run_replicate,
    stream,
)

__all__ = [
    "ARTIFACT_SCHEMA_VERSION",
    "BIAS_MODES",
    "ConfigError",
    "ExperimentConfig",
    "MetricSeries",
    "OUTPUT_DIR_ENV",
    "PRESET_NAMES",
    "ReplicateResult",
    "SCHEMA_VERSION",
    "aggregate_summary",
    "build_preset",
    "compute_metrics",
    "derive_seed",
    "dump",
    "from_dict",
    "load",
    "run_experiment",
    "run_replicate",
    "stream",
    "to_dict",
    "validate",
    "write_ot_demo",
]
