# %% [markdown]
# Round-robin best responses on small random markets.  Every equilibrium
# found should respect the worst-case bound for its mix of bidders.

# %%
import numpy as np

from fpa_autobid.audits import run_audits
from fpa_autobid.bounds import mixed_poa_bound
from fpa_autobid.core import Kind, evaluate_profile
from fpa_autobid.equilibrium import best_response_dynamics
from fpa_autobid.instances import random_instance

rng = np.random.default_rng(1)
ratios, kinds, stuck = [], [], 0
for k in range(60):
    inst = random_instance(rng, int(rng.integers(2, 4)), int(rng.integers(1, 4)))
    prof, converged, iters = best_response_dynamics(inst, grid=10, epsilon=1e-6)
    if not converged:
        stuck += 1
        continue
    assert all(r.passed for r in run_audits(inst, prof, 1e-6))
    ratios.append(evaluate_profile(inst, prof).ratio)
    kinds.append("value-only" if all(k is Kind.VALUE for k in inst.kinds) else "mixed")

# %%
ratios = np.array(ratios)
kinds = np.array(kinds)
print(f"{len(ratios)} equilibria, {stuck} runs without convergence")
for label in ("mixed", "value-only"):
    sel = ratios[kinds == label]
    if sel.size:
        print(f"{label:<10} n={sel.size:<3} min ratio {sel.min():.3f}  mean {sel.mean():.3f}")
print(f"worst-case floor for mixed markets: {mixed_poa_bound().bound_value:.3f}")
counts, edges = np.histogram(ratios, bins=5, range=(0.5, 1.0))
for c, lo in zip(counts, edges):
    print(f"[{lo:.1f}, {lo + 0.1:.1f})  {'#' * c}")
