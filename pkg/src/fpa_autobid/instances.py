"""Hard instances with known equilibria, and discretization of bid CDFs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bounds import payment_floor, phi_mixed, xlogx
from .core import AuctionInstance, BidDistribution, Kind, StrategyProfile


@dataclass(frozen=True, eq=False)
class ParamHardInstance:
    instance: AuctionInstance
    profile: StrategyProfile
    predicted_ratio: float
    params: dict


def thm1_instance(epsilon: float) -> ParamHardInstance:
    """Two value maximizers; bidder 0 takes both items, bidder 1 is priced out.

    Bidder 0 wins auction 0 for free (tie, higher value) and pays 1 for
    auction 1, which it does not value.  Bidder 1 would need to pay at least
    1 > 1 - epsilon to win auction 1, so the welfare is 1 out of 2 - epsilon.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    inst = AuctionInstance([[1.0, 0.0], [0.0, 1.0 - epsilon]], (Kind.VALUE, Kind.VALUE))
    prof = StrategyProfile.deterministic([[0.0, 1.0], [0.0, 0.0]])
    return ParamHardInstance(inst, prof, 1.0 / (2.0 - epsilon), {"epsilon": epsilon})


def discretize_cdf(cdf: Callable[[float], float], lo: float, hi: float, n: int) -> BidDistribution:
    """Quantize a bid CDF on ``[lo, hi]`` onto ``n`` evenly spaced atoms.

    Atom ``k`` carries the mass of ``(b_{k-1}, b_k]``, the first atom the mass
    ``cdf(lo)``, so a point mass at ``lo`` survives untouched.
    """
    if n < 2:
        raise ValueError("need at least two atoms")
    if cdf(hi) < 1.0 - 1e-9:
        raise ValueError(f"cdf({hi}) = {cdf(hi)} < 1: distribution has mass above hi")
    grid = np.linspace(lo, hi, n)
    c = np.array([cdf(float(b)) for b in grid])
    c[-1] = 1.0
    probs = np.diff(np.concatenate(([0.0], c)))
    if np.any(probs < -1e-12):
        raise ValueError("cdf must be nondecreasing")
    probs = np.clip(probs, 0.0, None)
    keep = probs > 0.0
    atom0 = probs[0]
    probs = probs[keep]
    # renormalize only the smeared part so the left atom keeps its exact mass
    if keep[0]:
        rest = probs[1:].sum()
        if rest > 0:
            probs[1:] *= (1.0 - atom0) / rest
    else:
        probs /= probs.sum()
    return BidDistribution(tuple(zip(grid[keep].tolist(), probs.tolist())))


def lemma_lb_cdf(t: float) -> Callable[[float], float]:
    """Bid CDF ``b -> min(1, t / (1 - b))`` that makes bidding 0 a best response."""
    return lambda b: min(1.0, t / (1.0 - b)) if b < 1.0 else 1.0


def lemma_lb_instance(t: float, n_atoms: int = 2000) -> ParamHardInstance:
    """Utility maximizer 0 versus value maximizer 1, which funds its overbidding
    in auction 0 with a free win in auction 1."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    if n_atoms < 10:
        raise ValueError("need at least 10 atoms")
    v22 = float(payment_floor(t))
    inst = AuctionInstance([[1.0, 0.0], [0.0, v22]], (Kind.UTILITY, Kind.VALUE))
    zero = BidDistribution.point(0.0)
    mixed = discretize_cdf(lemma_lb_cdf(t), 0.0, 1.0 - t, n_atoms)
    prof = StrategyProfile(((zero, zero), (mixed, zero)))
    return ParamHardInstance(inst, prof, float(phi_mixed(t)), {"t": t, "N": n_atoms})


def expected_payment_lemma_lb(t: float) -> float:
    """Mean of the continuous bid CDF: ``1 - t + t ln t``."""
    return 1.0 - t + float(xlogx(t))


def random_instance(rng: np.random.Generator, n: int, m: int, kinds=None, gamma: float | None = None):
    """Uniform [0, 1] values; random kinds; reserves drawn in ``[gamma * max, max]`` if gamma is given."""
    while True:
        values = rng.uniform(0.0, 1.0, size=(n, m))
        if values.max(axis=0).sum() > 0:
            break
    if kinds is None:
        kinds = [Kind.UTILITY if u else Kind.VALUE for u in rng.integers(0, 2, size=n)]
    if gamma is None:
        return AuctionInstance(values, tuple(kinds))
    top = values.max(axis=0)
    reserves = gamma * top + rng.uniform(0.0, 1.0, size=m) * (1.0 - gamma) * top
    return AuctionInstance(values, tuple(kinds), reserves, gamma)

