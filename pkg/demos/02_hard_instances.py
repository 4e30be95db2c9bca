# %% [markdown]
# Two constructions that make the bounds tight, checked numerically.

# %%
from fpa_autobid.audits import compute_ledger, run_audits
from fpa_autobid.bounds import mixed_poa_bound
from fpa_autobid.equilibrium import verify_equilibrium
from fpa_autobid.instances import lemma_lb_instance, thm1_instance

# %% two value maximizers: one of them is priced out of its own auction
for eps in (0.5, 0.1, 0.01):
    hard = thm1_instance(eps)
    rep = verify_equilibrium(hard.instance, hard.profile, epsilon=1e-9)
    print(f"eps={eps:<5} equilibrium={rep.is_equilibrium} ratio={rep.outcome.ratio:.6f} "
          f"predicted={hard.predicted_ratio:.6f}")

# %% utility maximizer vs value maximizer, with a discretized mixed overbid
t = mixed_poa_bound().minimizer_t
hard = lemma_lb_instance(t, 2000)
rep = verify_equilibrium(hard.instance, hard.profile, grid=200, epsilon=10 / 2000)
print("gaps", rep.gaps, "roi slack", rep.roi_slack)
print(f"ratio {rep.outcome.ratio:.5f}, predicted {hard.predicted_ratio:.5f}")

# %% the ledger shows where the welfare goes
led = compute_ledger(hard.instance, hard.profile)
print(f"A={led.A:.4f} B={led.B:.4f} C={led.C:.4f} D={led.D:.4f} V1={led.V1:.4f} V2={led.V2:.4f}")
for r in run_audits(hard.instance, hard.profile, epsilon=10 / 2000):
    print(f"{r.name:<14} margin {r.margin:+.2e}  {'ok' if r.passed else 'FAIL'}")
