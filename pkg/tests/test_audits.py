import numpy as np
import pytest
from hypothesis import given, settings

from conftest import setups
from fpa_autobid.audits import (
    audit_lemma_combination,
    audit_lemma_local,
    audit_lemma_local_ml,
    audit_lemma_value,
    audit_lemma_value_ml,
    compute_ledger,
    run_audits,
)
from fpa_autobid.bounds import payment_floor
from fpa_autobid.core import ABSTAIN, AuctionInstance, BidDistribution, Kind, StrategyProfile, evaluate_profile
from fpa_autobid.equilibrium import best_response_dynamics, verify_equilibrium
from fpa_autobid.frontier import truthful_proxy
from fpa_autobid.instances import lemma_lb_instance, random_instance, thm1_instance

U, V = Kind.UTILITY, Kind.VALUE


@pytest.fixture(scope="module")
def lemma_case():
    t = 0.2
    hard = lemma_lb_instance(t, 2000)
    return t, hard, compute_ledger(hard.instance, hard.profile)


def test_lemma_ledger(lemma_case):
    t, _, led = lemma_case
    h = float(payment_floor(t))
    assert led.A == pytest.approx(h, abs=1e-12)
    assert led.B == pytest.approx(t, abs=1e-12)
    assert led.C == 0.0
    assert led.D == pytest.approx(h, abs=5e-3)
    assert led.V1 == pytest.approx(h, abs=1e-12)
    assert led.V2 == 1.0


def test_thm1_ledger():
    hard = thm1_instance(0.01)
    led = compute_ledger(hard.instance, hard.profile)
    assert (led.A, led.B, led.C, led.D) == (1.0, 0.0, 1.0, 0.0)
    assert led.V1 == pytest.approx(1.99) and led.V2 == 0.0


def single_truthful(values=(0.4, 0.7)):
    inst = AuctionInstance([list(values)], (V,))
    return inst, StrategyProfile((truthful_proxy(inst, 0),))


def test_single_bidder_ledger_and_audits():
    inst, prof = single_truthful()
    led = compute_ledger(inst, prof)
    assert led.A == led.C == led.V1 == pytest.approx(1.1)
    assert led.B == led.D == led.V2 == 0.0
    assert all(r.passed for r in run_audits(inst, prof))


def test_value_audit_examples(lemma_case):
    hard = thm1_instance(0.01)
    res = audit_lemma_value(compute_ledger(hard.instance, hard.profile))
    assert res.passed and res.lhs == 2.0 and res.rhs == pytest.approx(1.99)
    _, _, led = lemma_case
    res = audit_lemma_value(led)
    assert res.passed and res.margin == pytest.approx(0.0, abs=1e-12)


def test_local_audit_is_tight_on_lemma_instance(lemma_case):
    t, hard, _ = lemma_case
    res = audit_lemma_local(hard.instance, hard.profile, 0, tol=10 / 2000)
    assert res.passed
    assert res.rhs == pytest.approx(float(payment_floor(t)), abs=1e-12)
    assert abs(res.margin) <= 5e-3


def test_local_audit_when_owner_always_wins():
    inst = AuctionInstance([[1.0], [0.3]], (U, U))
    prof = StrategyProfile.deterministic([[0.3], [0.3]])
    res = audit_lemma_local(inst, prof, 0)
    assert res.rhs == 0.0 and res.passed


def test_local_audit_when_owner_always_loses():
    inst = AuctionInstance([[1.0], [0.5]], (U, U))
    prof = StrategyProfile.deterministic([[0.0], [1.5]])
    res = audit_lemma_local(inst, prof, 0)
    assert res.rhs == 1.0
    assert res.lhs == 1.5
    assert res.passed


def test_combination_examples(lemma_case):
    t, _, led = lemma_case
    hard = lemma_lb_instance(t, 2000)
    res = audit_lemma_combination(hard.instance, hard.profile, led, tol=10 / 2000)
    assert res.passed
    assert res.rhs == pytest.approx(float(payment_floor(t)) + t, abs=5e-3)
    thm = thm1_instance(0.01)
    res = audit_lemma_combination(thm.instance, thm.profile, compute_ledger(thm.instance, thm.profile))
    assert res.passed and res.margin == 0.0
    inst, prof = single_truthful()
    assert audit_lemma_combination(inst, prof, compute_ledger(inst, prof)).passed


def test_reserve_variants_reduce_at_gamma_zero(lemma_case):
    _, hard, led = lemma_case
    a, b = audit_lemma_value(led), audit_lemma_value_ml(led, 0.0)
    assert (a.lhs, a.rhs) == (b.lhs, b.rhs)
    a = audit_lemma_local(hard.instance, hard.profile, 0)
    b = audit_lemma_local_ml(hard.instance, hard.profile, 0, 0.0)
    assert (a.lhs, a.rhs) == (b.lhs, b.rhs)


def test_local_ml_at_full_accuracy_is_linear():
    inst = AuctionInstance([[1.0], [0.5]], (U, U), [1.0], 1.0)
    # the competitor's bid sits under the reserve, so the owner wins exactly when it bids
    prof = StrategyProfile(((BidDistribution.from_pairs([(ABSTAIN, 0.5), (1.0, 0.5)]),), (BidDistribution.point(0.85),)))
    out = evaluate_profile(inst, prof)
    x = out.win_prob[0, 0]
    res = audit_lemma_local_ml(inst, prof, 0, 1.0)
    assert x == pytest.approx(0.5)
    assert res.rhs == pytest.approx(1.0 - x)


def test_full_accuracy_reserves_make_payments_cover():
    hard = thm1_instance(0.01)
    top = hard.instance.values.max(axis=0)
    inst = hard.instance.with_reserves(top, 1.0)
    prof, converged, _ = best_response_dynamics(inst, grid=20, epsilon=1e-9)
    assert converged
    led = compute_ledger(inst, prof)
    tol = 4 * 1e-9
    assert led.C >= led.V1 - tol
    assert all(r.passed for r in run_audits(inst, prof, 1e-9))


def test_reserved_all_value_instance():
    inst = AuctionInstance([[0.9, 0.2], [0.4, 0.8]], (V, V), [0.9, 0.8], 1.0)
    prof, converged, _ = best_response_dynamics(inst, grid=20, epsilon=1e-9)
    assert converged
    led = compute_ledger(inst, prof)
    assert audit_lemma_value_ml(led, 1.0, tol=4e-9).passed
    assert led.C >= led.V1 - 4e-9


def test_reserved_two_bidder_local_ml():
    inst = AuctionInstance([[0.91, 0.64], [0.54, 0.75]], (U, V), [0.91, 0.5], 0.5)
    prof, converged, _ = best_response_dynamics(inst, grid=20, epsilon=1e-9)
    assert converged
    # the value maximizer randomizes an overbid in the other bidder's auction
    assert len(prof[1, 0]) == 2
    assert verify_equilibrium(inst, prof, 20, 1e-9).is_equilibrium
    names = {r.name: r for r in run_audits(inst, prof, 1e-9)}
    assert "local-ml[0]" in names and "value-ml" in names
    assert all(r.passed for r in names.values())
    assert names["local-ml[0]"].margin > 0.1


def test_payment_floor_is_convex_and_nonnegative():
    z = np.linspace(1e-3, 1.0, 1000)
    f = payment_floor(z)
    assert np.all(f >= -1e-15)
    assert np.all(np.diff(f, 2) >= -1e-15)


@settings(max_examples=100, deadline=None)
@given(setups(max_n=3, max_m=3))
def test_ledger_identities(setup):
    inst, prof = setup
    out = evaluate_profile(inst, prof)
    led = compute_ledger(inst, prof, out)
    assert led.C + led.D + led.owner_payment == pytest.approx(out.per_bidder_payment.sum(), abs=1e-12)
    assert led.B <= led.V2 + 1e-12
    vm = inst.value_bidders
    assert led.A <= inst.values[vm].sum() + 1e-12
    assert 0.0 <= led.x_value <= 1.0 and 0.0 <= led.y_value <= 1.0
    assert led.V1 + led.V2 == pytest.approx(out.optimal_welfare)


def test_audits_on_random_equilibria():
    rng = np.random.default_rng(42)
    checked = 0
    for k in range(30):
        n, m = int(rng.integers(2, 4)), int(rng.integers(1, 4))
        inst = random_instance(rng, n, m, gamma=0.5 if k % 2 else None)
        prof, converged, _ = best_response_dynamics(inst, grid=10, max_iters=30, epsilon=1e-6)
        if not converged:
            continue
        checked += 1
        assert all(r.passed for r in run_audits(inst, prof, 1e-6))
    assert checked >= 10
