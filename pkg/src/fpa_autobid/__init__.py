"""Exact first-price auction analysis with utility- and value-maximizing bidders."""

from .core import (
    ABSTAIN,
    AuctionInstance,
    BidDistribution,
    EnumerationLimitError,
    Kind,
    OutcomeSummary,
    StrategyProfile,
    evaluate_profile,
    optimal_welfare,
    rightful_winner,
    win_probability,
)
from .frontier import (
    best_response,
    best_response_utility,
    best_response_value,
    competitor_landscape,
    concave_envelope,
    truthful_proxy,
)
from .equilibrium import best_response_dynamics, best_response_gap, verify_equilibrium
from .bounds import full_autobidding_ml_bound, gamma_sweep, mixed_poa_bound, ml_poa_bound
from .instances import discretize_cdf, lemma_lb_instance, thm1_instance
from .audits import compute_ledger, run_audits

__version__ = "0.1.0"
