"""Screening-then-testing of union null hypotheses with FWER control."""
from .probmodel import AltModel, alt_cdf, normal_cdf, normal_quantile
from .screening import (
    HypothesisMix,
    PairType,
    SelectedSizeDistribution,
    cond_max_cdf,
    expected_selected,
    p0,
    selected_size_pmf,
    selection_prob,
)
from .fwer_power import (
    ErrorPowerReport,
    error_power_report,
    fwer_approx,
    fwer_upper_bound,
    power_unconditional,
    rejection_prob_conditional,
)
from .thresholds import (
    ThresholdResult,
    ThresholdSpec,
    adaptive_threshold,
    default_threshold,
    oracle_threshold,
)

__version__ = "0.1.0"
