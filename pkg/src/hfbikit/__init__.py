"""Simulation and heavy-tail statistics for participation logs.

Submodules: ``event_log`` (records and CSV), ``powerlaw`` (discrete
power-law fitting), ``hfbi`` (generative model), ``evidence`` (propensity
curves), ``calibration`` (alpha grid search, per-node series), ``bursts``
(individual-level analysis) and ``cli``.
"""
__version__ = "0.1.0"

from .event_log import (ActivityLog, ParticipationRecord, frequency_sequence, interval_sequence,
                        prefix, read_csv, users_reaching, write_csv)
from .hfbi import HfbiParams, derive_params, simulate, validate_theory
from .powerlaw import PowerLawFit, mle_gamma, select_xmin, two_sample_ks

__all__ = [
    "ActivityLog", "ParticipationRecord", "frequency_sequence", "interval_sequence", "prefix",
    "read_csv", "users_reaching", "write_csv", "HfbiParams", "derive_params", "simulate",
    "validate_theory", "PowerLawFit", "mle_gamma", "select_xmin", "two_sample_ks",
]
