"""Exact and simulated statistics of the squared Hellinger distance between
random density matrices (Hilbert-Schmidt and Bures-Hall ensembles)."""

from .ensembles import Ensemble, EnsembleParams, McmcConfig
from .exactmoments import (
    mean_sqrt_trace_bh,
    mean_sqrt_trace_hs,
    moments,
    second_moment_sqrt_trace_bh,
    second_moment_sqrt_trace_hs,
    weingarten_constants,
)
from .harness import ExperimentConfig, emit_report, run_experiment
from .hellinger import (
    HellingerSummary,
    Scenario,
    asymptotic_mean_sq_affinity_hs,
    gamma_pdf,
    hellinger_summary,
    mean_affinity_fixed,
    mean_affinity_two_random,
    mean_sq_affinity_fixed,
    mean_sq_affinity_two_random,
)
from .numlinalg import affinity, matrix_sqrt_psd, squared_hellinger

__version__ = "0.1.0"
