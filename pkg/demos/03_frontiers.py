# %% [markdown]
# One bidder's view of one auction: every bid buys a (payment, value) point,
# and randomizing over bids reaches the upper concave envelope.

# %%
import numpy as np

from fpa_autobid.core import AuctionInstance, BidDistribution, Kind, StrategyProfile
from fpa_autobid.frontier import best_response_utility, best_response_value, build_frontier

U, V = Kind.UTILITY, Kind.VALUE
inst = AuctionInstance([[1.0, 1.0], [0.6, 0.5]], (V, U))
rival = StrategyProfile((
    (BidDistribution.point(0.0), BidDistribution.point(0.0)),
    (BidDistribution.from_pairs([(0.2, 0.5), (0.6, 0.5)]), BidDistribution.point(2.0)),
))

# %%
for j in range(2):
    f = build_frontier(inst, rival, 0, j)
    print(f"auction {j}: breakpoints", [(round(p.payment, 3), round(p.value, 3), p.bid) for p in f.breakpoints])
    print("          slopes", np.round(f.slopes, 3))

# %% as a value maximizer the slack from auction 0 funds part of the overbid in auction 1
br = best_response_value(inst, rival, 0)
print("value best response:", [d.atoms for d in br.row], f"value={br.value:.3f} payment={br.payment:.3f}")

# %% the same bidder as a utility maximizer stops at slope one
as_utility = AuctionInstance(inst.values, (U, U))
br = best_response_utility(as_utility, rival, 0)
print("utility best response:", [d.bids for d in br.row], f"utility={br.objective:.3f}")
