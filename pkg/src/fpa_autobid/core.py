"""Auction instances, randomized bid strategies and exact outcome evaluation.

All auctions are first-price: the highest bid wins and pays its own bid.
Ties go to the bidder with the higher value in that auction, then to the
smaller index.  With a reserve ``r_j`` a bid wins only if it is at least
``r_j``; if nobody clears the reserve the item is not sold.

Strategies are products of independent finite-support distributions, one per
(bidder, auction) pair, so every expectation can be computed exactly.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

PROB_TOL = 1e-12
DEFAULT_MAX_ATOMS = 10**6


class EnumerationLimitError(RuntimeError):
    """Raised when a joint support is too large to enumerate exactly."""


class Kind(str, enum.Enum):
    UTILITY = "utility"
    VALUE = "value"


class _Abstain:
    """Sentinel bid that never wins and never pays."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABSTAIN"

    def __reduce__(self):
        return (_Abstain, ())


ABSTAIN = _Abstain()


def is_abstain(bid) -> bool:
    return bid is ABSTAIN


def bid_key(bid) -> float:
    """Sort key for bids; ABSTAIN sorts below every real bid."""
    return -math.inf if bid is ABSTAIN else float(bid)


@dataclass(frozen=True)
class BidDistribution:
    """Finite-support randomized bid.

    ``atoms`` is a tuple of ``(bid, prob)`` pairs with strictly increasing bids
    (ABSTAIN first if present) and probabilities in (0, 1] summing to one.
    Use :meth:`from_pairs` to build one from unsorted or duplicated atoms.
    """

    atoms: tuple

    def __post_init__(self):
        atoms = tuple((b if b is ABSTAIN else float(b), float(p)) for b, p in self.atoms)
        if not atoms:
            raise ValueError("a bid distribution needs at least one atom")
        keys = [bid_key(b) for b, _ in atoms]
        for b, p in atoms:
            if b is not ABSTAIN and not (math.isfinite(b) and b >= 0.0):
                raise ValueError(f"bids must be finite and nonnegative, got {b!r}")
            if not (0.0 < p <= 1.0 + PROB_TOL):
                raise ValueError(f"atom probabilities must lie in (0, 1], got {p!r}")
        if any(k1 >= k2 for k1, k2 in zip(keys, keys[1:])):
            raise ValueError("bids must be strictly increasing")
        total = math.fsum(p for _, p in atoms)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def point(cls, bid) -> "BidDistribution":
        return cls(((bid, 1.0),))

    @classmethod
    def abstain(cls) -> "BidDistribution":
        return cls(((ABSTAIN, 1.0),))

    @classmethod
    def from_pairs(cls, pairs: Iterable, renormalize: bool = False) -> "BidDistribution":
        """Sort atoms, merge equal bids and drop zero-probability atoms."""
        merged: dict = {}
        for b, p in pairs:
            if p < 0:
                raise ValueError(f"negative probability {p!r}")
            b = b if b is ABSTAIN else float(b)
            merged[b] = merged.get(b, 0.0) + float(p)
        atoms = sorted(((b, p) for b, p in merged.items() if p > 0.0), key=lambda a: bid_key(a[0]))
        if renormalize:
            total = math.fsum(p for _, p in atoms)
            atoms = [(b, p / total) for b, p in atoms]
        return cls(tuple(atoms))

    @property
    def bids(self) -> tuple:
        return tuple(b for b, _ in self.atoms)

    @cached_property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])

    @cached_property
    def bid_array(self) -> np.ndarray:
        """Bids as floats, with ABSTAIN mapped to ``-inf``."""
        return np.array([bid_key(b) for b, _ in self.atoms])

    @property
    def is_deterministic(self) -> bool:
        return len(self.atoms) == 1

    def __len__(self):
        return len(self.atoms)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.choice(len(self.atoms), size=size, p=self.probs / self.probs.sum())
        return self.bid_array[idx]


@dataclass(frozen=True, eq=False)
class AuctionInstance:
    """Values ``v[i, j]`` of ``n`` bidders for ``m`` simultaneous auctions."""

    values: np.ndarray
    kinds: tuple
    reserves: np.ndarray | None = None
    gamma: float | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.size == 0:
            raise ValueError("values must be a nonempty n x m matrix")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("values must be finite and nonnegative")
        if values.max(axis=0).sum() <= 0:
            raise ValueError("optimal welfare must be positive")
        kinds = tuple(Kind(k) for k in self.kinds)
        if len(kinds) != values.shape[0]:
            raise ValueError(f"expected {values.shape[0]} kinds, got {len(kinds)}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kinds", kinds)

        if self.reserves is None:
            if self.gamma is not None:
                raise ValueError("gamma given without reserves")
            return
        reserves = np.array(self.reserves, dtype=float)
        if reserves.shape != (values.shape[1],):
            raise ValueError(f"reserves must have length {values.shape[1]}")
        gamma = 0.0 if self.gamma is None else float(self.gamma)
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        top = values.max(axis=0)
        slack = 1e-12 * np.maximum(top, 1.0)
        if np.any(reserves < gamma * top - slack) or np.any(reserves > top + slack):
            raise ValueError("reserves must satisfy gamma * max_i v_ij <= r_j <= max_i v_ij")
        reserves.setflags(write=False)
        object.__setattr__(self, "reserves", reserves)
        object.__setattr__(self, "gamma", gamma)

    @property
    def num_bidders(self) -> int:
        return self.values.shape[0]

    @property
    def num_auctions(self) -> int:
        return self.values.shape[1]

    @property
    def utility_bidders(self) -> list:
        return [i for i, k in enumerate(self.kinds) if k is Kind.UTILITY]

    @property
    def value_bidders(self) -> list:
        return [i for i, k in enumerate(self.kinds) if k is Kind.VALUE]

    def reserve(self, auction: int) -> float:
        return 0.0 if self.reserves is None else float(self.reserves[auction])

    def beats(self, i: int, k: int, auction: int) -> bool:
        """Whether bidder ``i`` wins a tie against bidder ``k`` in ``auction``."""
        vi, vk = self.values[i, auction], self.values[k, auction]
        return vi > vk or (vi == vk and i < k)

    def with_reserves(self, reserves, gamma: float) -> "AuctionInstance":
        return AuctionInstance(self.values, self.kinds, reserves, gamma)


@dataclass(frozen=True)
class StrategyProfile:
    """An ``n x m`` grid of independent bid distributions."""

    strategies: tuple

    def __post_init__(self):
        rows = tuple(tuple(row) for row in self.strategies)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("strategies must form a rectangular n x m grid")
        for row in rows:
            for d in row:
                if not isinstance(d, BidDistribution):
                    raise TypeError(f"expected BidDistribution, got {type(d).__name__}")
        object.__setattr__(self, "strategies", rows)

    @classmethod
    def deterministic(cls, bids) -> "StrategyProfile":
        return cls(tuple(tuple(BidDistribution.point(b) for b in row) for row in bids))

    @property
    def shape(self) -> tuple:
        return len(self.strategies), len(self.strategies[0])

    def __getitem__(self, idx) -> BidDistribution:
        i, j = idx
        return self.strategies[i][j]

    def row(self, i: int) -> tuple:
        return self.strategies[i]

    def with_row(self, i: int, row: Sequence[BidDistribution]) -> "StrategyProfile":
        rows = list(self.strategies)
        rows[i] = tuple(row)
        return StrategyProfile(tuple(rows))

    def with_entry(self, i: int, j: int, dist: BidDistribution) -> "StrategyProfile":
        row = list(self.strategies[i])
        row[j] = dist
        return self.with_row(i, row)

    def check_shape(self, instance: AuctionInstance):
        if self.shape != instance.values.shape:
            raise ValueError(f"profile shape {self.shape} does not match instance {instance.values.shape}")


@dataclass(frozen=True, eq=False)
class OutcomeSummary:
    win_prob: np.ndarray
    exp_value: np.ndarray
    exp_payment: np.ndarray
    optimal_welfare: float
    per_bidder_value: np.ndarray = field(init=False)
    per_bidder_payment: np.ndarray = field(init=False)
    welfare: float = field(init=False)
    ratio: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "per_bidder_value", self.exp_value.sum(axis=1))
        object.__setattr__(self, "per_bidder_payment", self.exp_payment.sum(axis=1))
        welfare = float(self.per_bidder_value.sum())
        object.__setattr__(self, "welfare", welfare)
        object.__setattr__(self, "ratio", welfare / self.optimal_welfare)

    @property
    def roi_slack(self) -> np.ndarray:
        return self.per_bidder_value - self.per_bidder_payment

    @property
    def utility(self) -> np.ndarray:
        return self.per_bidder_value - self.per_bidder_payment


def rightful_winner(instance: AuctionInstance, auction: int) -> int:
    """Highest-value bidder of ``auction``, smallest index among ties."""
    return int(np.argmax(instance.values[:, auction]))


def optimal_welfare(instance: AuctionInstance) -> float:
    return float(instance.values.max(axis=0).sum())


def _as_bid_array(bids) -> np.ndarray:
    return np.array([bid_key(b) for b in np.atleast_1d(np.asarray(bids, dtype=object))], dtype=float)


def win_probabilities(instance, profile, bidder, auction, bids) -> np.ndarray:
    """Vectorized :func:`win_probability` over an array of bids (``-inf`` = ABSTAIN).

    Competitors are independent, so the focal bid wins iff it beats each
    competitor separately: a strictly lower competitor bid, or an equal bid
    from a competitor the focal bidder out-ranks in the tie order.
    """
    bids = np.asarray(bids, dtype=float)
    q = np.ones_like(bids)
    for k in range(instance.num_bidders):
        if k == bidder:
            continue
        d = profile[k, auction]
        cum = np.concatenate(([0.0], np.cumsum(d.probs)))
        side = "right" if instance.beats(bidder, k, auction) else "left"
        q *= cum[np.searchsorted(d.bid_array, bids, side=side)]
    q[~np.isfinite(bids)] = 0.0
    q[bids < instance.reserve(auction)] = 0.0
    return np.clip(q, 0.0, 1.0)


def win_probability(instance, profile, bidder: int, auction: int, bid) -> float:
    """Exact probability that ``bidder`` wins ``auction`` when bidding ``bid``."""
    return float(win_probabilities(instance, profile, bidder, auction, _as_bid_array([bid]))[0])


def evaluate_profile(instance: AuctionInstance, profile: StrategyProfile) -> OutcomeSummary:
    """Exact expected allocation, value and payment for every bidder-auction pair."""
    profile.check_shape(instance)
    n, m = instance.values.shape
    win = np.zeros((n, m))
    pay = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            d = profile[i, j]
            b = d.bid_array
            q = win_probabilities(instance, profile, i, j, b)
            p = d.probs
            win[i, j] = p @ q
            pay[i, j] = p @ (np.where(np.isfinite(b), b, 0.0) * q)
    return OutcomeSummary(win, win * instance.values, pay, optimal_welfare(instance))


def allocate(instance: AuctionInstance, auction: int, bids: Sequence) -> int | None:
    """Winner of one realized auction, or ``None`` if nothing is sold."""
    best = None
    reserve = instance.reserve(auction)
    for i, b in enumerate(bids):
        b = bid_key(b)
        if not math.isfinite(b) or b < reserve:
            continue
        if best is None or b > bid_key(bids[best]) or (b == bid_key(bids[best]) and instance.beats(i, best, auction)):
            best = i
    return best


def enumerate_auction(instance, profile, auction: int, max_atoms: int = DEFAULT_MAX_ATOMS):
    """Brute-force expected win probability and payment per bidder in one auction.

    Walks the full product of the bidders' supports.  Independent of the
    product-form shortcut in :func:`evaluate_profile`; used to cross-check it.
    """
    dists = [profile[i, auction] for i in range(instance.num_bidders)]
    size = math.prod(len(d) for d in dists)
    if size > max_atoms:
        raise EnumerationLimitError(f"auction {auction}: joint support {size} exceeds cap {max_atoms}")
    win = np.zeros(instance.num_bidders)
    pay = np.zeros(instance.num_bidders)
    for combo in itertools.product(*(d.atoms for d in dists)):
        bids = [b for b, _ in combo]
        prob = math.prod(p for _, p in combo)
        w = allocate(instance, auction, bids)
        if w is not None:
            win[w] += prob
            pay[w] += prob * float(bids[w])
    return win, pay
