"""Load balancing with delayed acknowledgements."""

from ._polcore import (
    Agent,
    ConfigError,
    default_config,
    fit_exponential,
    job_count_pmf_mm,
    load_trace,
    resolve_config,
    run_experiment,
    run_strategy,
    step,
    summarize,
)

__all__ = [
    "Agent",
    "ConfigError",
    "default_config",
    "fit_exponential",
    "job_count_pmf_mm",
    "load_trace",
    "resolve_config",
    "run_experiment",
    "run_strategy",
    "step",
    "summarize",
]
