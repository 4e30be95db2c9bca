"""Value-payment frontiers and best responses.

For a fixed bidder and auction, every bid ``b`` yields an expected
(payment, value) point ``(b * q(b), v * q(b))`` where ``q`` is the win
probability against the other bidders.  Randomizing over bids reaches the
upper concave envelope of those points.  Utility maximizers pick the point of
largest ``value - payment`` in each auction separately; value maximizers
spend ROI slack across auctions greedily, steepest frontier segment first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import (
    ABSTAIN,
    AuctionInstance,
    BidDistribution,
    Kind,
    StrategyProfile,
    bid_key,
)

DEFAULT_DELTA = 1e-9
_HULL_RTOL = 1e-12


class FrontierPoint(NamedTuple):
    payment: float
    value: float
    bid: object


@dataclass(frozen=True, eq=False)
class CompetitorLandscape:
    """Distribution of the highest competing bid in one auction.

    ``probs[k]`` is the mass of the highest competing bid at
    ``thresholds[k]``; ``tie_probs[k] <= probs[k]`` is the part of that mass
    on which the focal bidder still wins when bidding exactly
    ``thresholds[k]``.  Competitors that abstain are folded into the atom at
    zero as ties the focal bidder wins.
    """

    thresholds: np.ndarray
    probs: np.ndarray
    tie_probs: np.ndarray

    def __post_init__(self):
        if abs(self.probs.sum() - 1.0) > 1e-12:
            raise ValueError("landscape probabilities must sum to 1")
        if np.any(np.diff(self.thresholds) <= 0):
            raise ValueError("thresholds must be strictly increasing")

    @property
    def tie_wins(self) -> np.ndarray:
        """Per atom: does the focal bidder win every tie at this threshold."""
        return self.tie_probs >= self.probs - 1e-15

    @property
    def atoms(self) -> list:
        return list(zip(self.thresholds.tolist(), self.probs.tolist(), self.tie_wins.tolist()))

    def win_prob(self, bids) -> np.ndarray:
        """Win probability at each bid (``-inf`` = ABSTAIN), ignoring reserves."""
        bids = np.asarray(bids, dtype=float)
        below = np.concatenate(([0.0], np.cumsum(self.probs)))
        k = np.searchsorted(self.thresholds, bids, side="left")
        q = below[k]
        hit = k < len(self.thresholds)
        hit[hit] = self.thresholds[k[hit]] == bids[hit]
        q[hit] += self.tie_probs[k[hit]]
        q[~np.isfinite(bids)] = 0.0
        return np.clip(q, 0.0, 1.0)


@dataclass(frozen=True, eq=False)
class Frontier:
    """Concave, increasing piecewise-linear value-payment curve."""

    breakpoints: tuple
    value_cap: float

    @property
    def payments(self) -> np.ndarray:
        return np.array([p.payment for p in self.breakpoints])

    @property
    def values(self) -> np.ndarray:
        return np.array([p.value for p in self.breakpoints])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.payments)

    def __call__(self, payment) -> np.ndarray:
        """H(w): the best value reachable with expected payment at most ``w``."""
        return np.interp(payment, self.payments, self.values)

    def to_dict(self) -> dict:
        return {
            "value_cap": self.value_cap,
            "breakpoints": [
                {"payment": p.payment, "value": p.value, "bid": None if p.bid is ABSTAIN else p.bid}
                for p in self.breakpoints
            ],
        }


class BestResponse(NamedTuple):
    row: tuple
    objective: float
    value: float
    payment: float

    @property
    def slack(self) -> float:
        return self.value - self.payment


def competitor_landscape(instance: AuctionInstance, profile: StrategyProfile, bidder: int, auction: int):
    others = [k for k in range(instance.num_bidders) if k != bidder]
    dists = [profile[k, auction] for k in others]
    reals = [d.bid_array[np.isfinite(d.bid_array)] for d in dists]
    thresholds = np.unique(np.concatenate([np.zeros(1)] + reals))
    le = np.ones_like(thresholds)
    lt = np.ones_like(thresholds)
    win = np.ones_like(thresholds)
    for k, d in zip(others, dists):
        cum = np.concatenate(([0.0], np.cumsum(d.probs)))
        p_le = cum[np.searchsorted(d.bid_array, thresholds, side="right")]
        p_lt = cum[np.searchsorted(d.bid_array, thresholds, side="left")]
        le *= p_le
        lt *= p_lt
        win *= p_le if instance.beats(bidder, k, auction) else p_lt
    # everything at or below zero, abstentions included, lands on the zero atom
    lt[0] = 0.0
    probs = np.maximum(np.diff(np.concatenate(([0.0], le))), 0.0)
    probs /= probs.sum()
    tie = np.clip(win - lt, 0.0, probs)
    keep = probs > 0.0
    return CompetitorLandscape(thresholds[keep], probs[keep], tie[keep])


def resolve_grid(instance: AuctionInstance, grid) -> np.ndarray:
    """``None`` -> no grid; an int ``N`` -> ``N + 1`` evenly spaced bids on [0, max v]."""
    if grid is None:
        return np.zeros(0)
    if isinstance(grid, (int, np.integer)):
        return np.linspace(0.0, float(instance.values.max()), int(grid) + 1)
    return np.asarray(grid, dtype=float)


def candidate_bids(landscape: CompetitorLandscape, value_cap: float, reserve: float = 0.0,
                   grid=(), delta: float = DEFAULT_DELTA, extra=()) -> list:
    """ABSTAIN, every threshold, threshold + delta where ties can be lost, v, r, grid, extras."""
    lost = landscape.thresholds[~landscape.tie_wins] + delta
    pool = [landscape.thresholds, lost, np.atleast_1d(value_cap), np.atleast_1d(reserve), np.asarray(grid, float)]
    extra = [float(b) for b in extra if b is not ABSTAIN]
    pool.append(np.asarray(extra, dtype=float))
    reals = np.unique(np.concatenate(pool))
    reals = reals[np.isfinite(reals) & (reals >= 0.0)]
    return [ABSTAIN] + reals.tolist()


def _point_arrays(landscape, value_cap, reserve, bids):
    b = np.array([bid_key(x) for x in bids])
    q = landscape.win_prob(b)
    if reserve:
        q[b < reserve] = 0.0
    pay = np.where(np.isfinite(b), b, 0.0) * q
    return pay, value_cap * q


def _pareto(points):
    """Drop points beaten by another with no larger payment and no smaller value."""
    ordered = sorted(points, key=lambda p: (p.payment, -p.value, bid_key(p.bid)))
    kept = []
    for p in ordered:
        if not kept or p.value > kept[-1].value:
            kept.append(p)
    return kept


def attainable_points(landscape: CompetitorLandscape, value_cap: float, reserve: float | None,
                      candidate_bids: Sequence) -> list:
    pay, val = _point_arrays(landscape, value_cap, reserve or 0.0, candidate_bids)
    return _pareto([FrontierPoint(float(p), float(v), b) for p, v, b in zip(pay, val, candidate_bids)])


def concave_envelope(points: Sequence[FrontierPoint], value_cap: float | None = None) -> Frontier:
    pts = _pareto(points)
    if not pts or pts[0].payment != 0.0:
        raise ValueError("envelope needs a point with zero payment")
    hull: list = []
    for p in pts:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            lhs = (a.payment - o.payment) * (p.value - o.value)
            rhs = (a.value - o.value) * (p.payment - o.payment)
            # pop a when it sits on or under the chord o -> p
            if lhs - rhs >= -_HULL_RTOL * (abs(lhs) + abs(rhs)):
                hull.pop()
            else:
                break
        hull.append(p)
    cap = max(p.value for p in pts) if value_cap is None else value_cap
    return Frontier(tuple(hull), float(cap))


def build_frontier(instance, profile, bidder, auction, grid=None, delta=DEFAULT_DELTA, extra=()):
    """Landscape -> candidate bids -> attainable points -> envelope, for one auction."""
    land = competitor_landscape(instance, profile, bidder, auction)
    v = float(instance.values[bidder, auction])
    r = instance.reserve(auction)
    bids = candidate_bids(land, v, r, resolve_grid(instance, grid), delta, extra)
    return concave_envelope(attainable_points(land, v, r, bids), v)


def _own_bids(profile, bidder, auction, include_own):
    return profile[bidder, auction].bids if include_own else ()


def best_response_utility(instance, profile, bidder: int, grid=None, delta: float = DEFAULT_DELTA,
                          include_own: bool = False) -> BestResponse:
    """Per-auction utility-maximizing deterministic bid.

    Among candidates whose utility is within 1e-12 of the best, the smallest
    payment wins, then ABSTAIN, then the smallest bid.
    """
    if instance.kinds[bidder] is not Kind.UTILITY:
        raise ValueError(f"bidder {bidder} is not a utility maximizer")
    grid = resolve_grid(instance, grid)
    row, value, payment = [], 0.0, 0.0
    for j in range(instance.num_auctions):
        land = competitor_landscape(instance, profile, bidder, j)
        v = float(instance.values[bidder, j])
        r = instance.reserve(j)
        bids = candidate_bids(land, v, r, grid, delta, _own_bids(profile, bidder, j, include_own))
        pay, val = _point_arrays(land, v, r, bids)
        util = val - pay
        near = np.flatnonzero(util >= util.max() - 1e-12)
        k = min(near, key=lambda t: (pay[t], bid_key(bids[t])))
        row.append(BidDistribution.point(bids[k]))
        value += val[k]
        payment += pay[k]
    return BestResponse(tuple(row), value - payment, value, payment)


def _mixture(a: FrontierPoint, b: FrontierPoint, weight_b: float) -> BidDistribution:
    if weight_b <= 0.0:
        return BidDistribution.point(a.bid)
    if weight_b >= 1.0:
        return BidDistribution.point(b.bid)
    return BidDistribution.from_pairs([(a.bid, 1.0 - weight_b), (b.bid, weight_b)])


def greedy_value_allocation(frontiers: Sequence[Frontier]):
    """Spend ROI slack over concave frontiers, steepest segments first.

    Returns per-frontier ``(index, weight)``: the chosen point sits at
    breakpoint ``index`` moved a fraction ``weight`` towards ``index + 1``.
    Segments of slope >= 1 never cost slack and are always taken.
    """
    pos = []
    slack = 0.0
    for f in frontiers:
        k = 0
        slack += f.breakpoints[0].value
        s = f.slopes
        while k < len(s) and s[k] >= 1.0:
            slack += (f.values[k + 1] - f.values[k]) - (f.payments[k + 1] - f.payments[k])
            k += 1
        pos.append([k, 0.0])
    segments = []
    for j, f in enumerate(frontiers):
        s = f.slopes
        for k in range(pos[j][0], len(s)):
            if s[k] > 0.0:
                segments.append((-s[k], j, k))
    segments.sort()
    for neg_s, j, k in segments:
        f = frontiers[j]
        width = f.payments[k + 1] - f.payments[k]
        cost = (1.0 + neg_s) * width
        if cost <= slack:
            slack -= cost
            pos[j] = [k + 1, 0.0]
        else:
            pos[j] = [k, max(slack, 0.0) / cost]
            break
    return [tuple(p) for p in pos]


def best_response_value(instance, profile, bidder: int, grid=None, delta: float = DEFAULT_DELTA,
                        include_own: bool = False) -> BestResponse:
    """Maximize expected value subject to expected payment <= expected value."""
    if instance.kinds[bidder] is not Kind.VALUE:
        raise ValueError(f"bidder {bidder} is not a value maximizer")
    frontiers = [
        build_frontier(instance, profile, bidder, j, grid, delta, _own_bids(profile, bidder, j, include_own))
        for j in range(instance.num_auctions)
    ]
    row, value, payment = [], 0.0, 0.0
    for f, (k, w) in zip(frontiers, greedy_value_allocation(frontiers)):
        a = f.breakpoints[k]
        if w > 0.0:
            b = f.breakpoints[k + 1]
            row.append(_mixture(a, b, w))
            value += (1 - w) * a.value + w * b.value
            payment += (1 - w) * a.payment + w * b.payment
        else:
            row.append(BidDistribution.point(a.bid))
            value += a.value
            payment += a.payment
    return BestResponse(tuple(row), value, value, payment)


def best_response(instance, profile, bidder: int, grid=None, delta: float = DEFAULT_DELTA,
                  include_own: bool = False) -> BestResponse:
    if instance.kinds[bidder] is Kind.UTILITY:
        return best_response_utility(instance, profile, bidder, grid, delta, include_own)
    return best_response_value(instance, profile, bidder, grid, delta, include_own)


def truthful_proxy(instance: AuctionInstance, bidder: int) -> tuple:
    """Bid exactly the value everywhere: every won auction nets zero ROI slack."""
    return tuple(BidDistribution.point(float(v)) for v in instance.values[bidder])
