import numpy as np
import pytest
from hypothesis import strategies as st

from fpa_autobid.core import ABSTAIN, AuctionInstance, BidDistribution, Kind, StrategyProfile


def random_distribution(rng, max_atoms=3, abstain_p=0.15, hi=1.2, levels=None):
    """A few atoms; bids optionally snapped to ``levels`` so ties actually happen."""
    k = int(rng.integers(1, max_atoms + 1))
    pairs = []
    for _ in range(k):
        if rng.random() < abstain_p:
            b = ABSTAIN
        elif levels is not None:
            b = float(rng.choice(levels))
        else:
            b = float(rng.uniform(0.0, hi))
        pairs.append((b, float(rng.uniform(0.1, 1.0))))
    return BidDistribution.from_pairs(pairs, renormalize=True)


def random_profile(rng, n, m, **kw):
    return StrategyProfile(tuple(
        tuple(random_distribution(rng, **kw) for _ in range(m)) for _ in range(n)
    ))


def random_setup(rng, n, m, reserves=False, levels=None):
    values = rng.uniform(0.0, 1.0, size=(n, m))
    if levels is not None:
        values = rng.choice(levels, size=(n, m))
        values[0] = np.maximum(values[0], 0.1)
    kinds = tuple(Kind.UTILITY if u else Kind.VALUE for u in rng.integers(0, 2, size=n))
    inst = AuctionInstance(values, kinds)
    if reserves:
        top = inst.values.max(axis=0)
        g = float(rng.uniform(0, 1))
        inst = inst.with_reserves(g * top + rng.uniform(0, 1, m) * (1 - g) * top, g)
    return inst, random_profile(rng, n, m, levels=levels)


@st.composite
def setups(draw, max_n=3, max_m=2, reserves=None):
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(1, max_m))
    res = draw(st.booleans()) if reserves is None else reserves
    coarse = draw(st.booleans())
    rng = np.random.default_rng(seed)
    levels = [0.0, 0.25, 0.5, 0.75, 1.0] if coarse else None
    return random_setup(rng, n, m, res, levels)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
