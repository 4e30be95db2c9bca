"""Approximate equilibrium checks and round-robin best-response dynamics."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import AuctionInstance, Kind, OutcomeSummary, StrategyProfile, evaluate_profile
from .frontier import DEFAULT_DELTA, best_response, best_response_utility, truthful_proxy

log = logging.getLogger(__name__)


class InfeasibleProfileError(ValueError):
    """A value maximizer's current strategy violates its ROI constraint."""

    def __init__(self, bidder: int, slack: float):
        super().__init__(f"bidder {bidder} violates its ROI constraint (slack {slack:.3g})")
        self.bidder = bidder
        self.slack = slack


@dataclass(frozen=True, eq=False)
class EquilibriumReport:
    gaps: np.ndarray
    roi_slack: np.ndarray
    epsilon: float
    is_equilibrium: bool
    outcome: OutcomeSummary

    def to_dict(self) -> dict:
        o = self.outcome
        return {
            "is_equilibrium": self.is_equilibrium,
            "epsilon": self.epsilon,
            "gaps": self.gaps.tolist(),
            "roi_slack": self.roi_slack.tolist(),
            "welfare": o.welfare,
            "optimal_welfare": o.optimal_welfare,
            "ratio": o.ratio,
            "per_bidder_value": o.per_bidder_value.tolist(),
            "per_bidder_payment": o.per_bidder_payment.tolist(),
        }


def current_objective(instance: AuctionInstance, outcome: OutcomeSummary, bidder: int) -> float:
    if instance.kinds[bidder] is Kind.UTILITY:
        return float(outcome.utility[bidder])
    return float(outcome.per_bidder_value[bidder])


def best_response_gap(instance, profile, bidder: int, grid=None, epsilon: float = 1e-9,
                      delta: float = DEFAULT_DELTA, outcome: OutcomeSummary | None = None) -> float:
    """Best-response objective minus the current objective of ``bidder``.

    The bidder's own support is added to the candidate bids, so the gap is
    nonnegative up to rounding.  Raises :class:`InfeasibleProfileError` for a
    value maximizer whose ROI slack is below ``-epsilon``.
    """
    outcome = outcome or evaluate_profile(instance, profile)
    if instance.kinds[bidder] is Kind.VALUE:
        slack = float(outcome.roi_slack[bidder])
        if slack < -epsilon:
            raise InfeasibleProfileError(bidder, slack)
    br = best_response(instance, profile, bidder, grid, delta, include_own=True)
    return br.objective - current_objective(instance, outcome, bidder)


def verify_equilibrium(instance, profile, grid=None, epsilon: float = 1e-9,
                       delta: float = DEFAULT_DELTA) -> EquilibriumReport:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    outcome = evaluate_profile(instance, profile)
    gaps = np.array([
        best_response_gap(instance, profile, i, grid, epsilon, delta, outcome)
        for i in range(instance.num_bidders)
    ])
    slack = outcome.roi_slack
    vm = np.array([k is Kind.VALUE for k in instance.kinds])
    ok = bool(np.all(gaps <= epsilon) and np.all(slack[vm] >= -epsilon))
    return EquilibriumReport(gaps, slack, epsilon, ok, outcome)


def default_initial_profile(instance: AuctionInstance, grid=None) -> StrategyProfile:
    """Everyone bids truthfully.

    Truthful bids are ROI-feasible for value maximizers, and losing
    truthful bids keep threatening the winners, which damps the undercutting
    ladders that start from abstaining utility maximizers.
    """
    return StrategyProfile(tuple(truthful_proxy(instance, i) for i in range(instance.num_bidders)))


def utility_seeded_profile(instance: AuctionInstance, grid=None) -> StrategyProfile:
    """Truthful value maximizers; utility maximizers best-respond to truthful opponents."""
    truthful = default_initial_profile(instance)
    rows = []
    for i, kind in enumerate(instance.kinds):
        if kind is Kind.UTILITY:
            rows.append(best_response_utility(instance, truthful, i, grid).row)
        else:
            rows.append(truthful.row(i))
    return StrategyProfile(tuple(rows))


def _feasible(instance, outcome, epsilon) -> bool:
    vm = instance.value_bidders
    return bool(np.all(outcome.roi_slack[vm] >= -epsilon)) if vm else True


def best_response_dynamics(instance, initial_profile: StrategyProfile | None = None, grid=None,
                           max_iters: int = 100, epsilon: float = 1e-9, delta: float = DEFAULT_DELTA):
    """Round-robin best responses until every gap is at most ``epsilon``.

    Bidders whose gap is already within ``epsilon`` keep their strategy.
    Returns ``(profile, converged, iters)``.  Without convergence the last
    profile in which every value maximizer was ROI-feasible is returned.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    profile = initial_profile or default_initial_profile(instance, grid)
    profile.check_shape(instance)
    last_feasible = profile if _feasible(instance, evaluate_profile(instance, profile), epsilon) else None
    for it in range(1, max_iters + 1):
        for i in range(instance.num_bidders):
            outcome = evaluate_profile(instance, profile)
            try:
                gap = best_response_gap(instance, profile, i, grid, epsilon, delta, outcome)
            except InfeasibleProfileError:
                gap = np.inf
            if gap > epsilon:
                profile = profile.with_row(i, best_response(instance, profile, i, grid, delta).row)
        try:
            report = verify_equilibrium(instance, profile, grid, epsilon, delta)
        except InfeasibleProfileError:
            continue
        if _feasible(instance, report.outcome, epsilon):
            last_feasible = profile
        if report.is_equilibrium:
            return profile, True, it
    log.info("no convergence after %d sweeps", max_iters)
    return (last_feasible or profile), False, max_iters
