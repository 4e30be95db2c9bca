import numpy as np
import pytest
from scipy import integrate

from fpa_autobid.bounds import mixed_poa_bound, phi_mixed
from fpa_autobid.core import ABSTAIN, Kind, evaluate_profile
from fpa_autobid.frontier import candidate_bids, competitor_landscape
from fpa_autobid.instances import (
    discretize_cdf,
    expected_payment_lemma_lb,
    lemma_lb_cdf,
    lemma_lb_instance,
    random_instance,
    thm1_instance,
)


def test_thm1_construction():
    hard = thm1_instance(0.01)
    np.testing.assert_array_equal(hard.instance.values, [[1.0, 0.0], [0.0, 0.99]])
    assert hard.instance.kinds == (Kind.VALUE, Kind.VALUE)
    assert [[d.bids for d in row] for row in hard.profile.strategies] == [[(0.0,), (1.0,)], [(0.0,), (0.0,)]]
    assert hard.predicted_ratio == pytest.approx(1 / 1.99, abs=1e-15)
    assert thm1_instance(1e-9).predicted_ratio == pytest.approx(0.5, abs=1e-9)
    with pytest.raises(ValueError):
        thm1_instance(0.0)


def test_lemma_cdf_value():
    assert lemma_lb_cdf(0.2)(0.5) == pytest.approx(0.4)
    assert lemma_lb_cdf(0.2)(0.0) == pytest.approx(0.2)
    assert lemma_lb_cdf(0.2)(0.8) == 1.0


@pytest.mark.parametrize("t", [0.5, 0.158, 0.9])
def test_lemma_mean_bid_matches_integral(t):
    cdf = lemma_lb_cdf(t)
    # the bid is nonnegative, so its mean is the integral of the survival function
    mean, _ = integrate.quad(lambda b: 1.0 - cdf(b), 0.0, 1.0 - t, epsabs=1e-13)
    assert expected_payment_lemma_lb(t) == pytest.approx(mean, abs=1e-10)
    assert lemma_lb_instance(t, 100).instance.values[1, 1] == pytest.approx(mean, abs=1e-10)
    if t == 0.5:
        assert mean == pytest.approx(0.153426, abs=1e-6)


def test_lemma_instance_shape():
    t = 0.3
    hard = lemma_lb_instance(t, 500)
    inst, prof = hard.instance, hard.profile
    assert inst.kinds == (Kind.UTILITY, Kind.VALUE)
    assert inst.values[0, 0] == 1.0 and inst.values[0, 1] == 0.0 and inst.values[1, 0] == 0.0
    assert prof[0, 0].bids == (0.0,) and prof[0, 1].bids == (0.0,) and prof[1, 1].bids == (0.0,)
    mixed = prof[1, 0]
    assert len(mixed) == 500
    assert mixed.atoms[0] == (0.0, t)
    assert mixed.bids[-1] == pytest.approx(1 - t)
    assert hard.predicted_ratio == pytest.approx(float(phi_mixed(t)), abs=1e-12)


def test_lemma_payment_at_minimizer():
    t = mixed_poa_bound().minimizer_t
    hard = lemma_lb_instance(t, 2000)
    out = evaluate_profile(hard.instance, hard.profile)
    assert out.exp_payment[1, 0] == pytest.approx(expected_payment_lemma_lb(t), abs=5e-3)
    assert out.ratio == pytest.approx(hard.predicted_ratio, abs=5e-3)


def test_utility_is_flat_for_the_utility_bidder():
    t, n_atoms = 0.25, 400
    hard = lemma_lb_instance(t, n_atoms)
    inst, prof = hard.instance, hard.profile
    land = competitor_landscape(inst, prof, 0, 0)
    bids = [b for b in candidate_bids(land, 1.0, grid=np.linspace(0, 1 - t, 97)) if b is not ABSTAIN]
    bids = np.array([b for b in bids if b <= 1 - t])
    util = (1.0 - bids) * land.win_prob(bids)
    assert np.all(np.abs(util - t) <= 10 / n_atoms)


def test_discretize_keeps_left_atom():
    d = discretize_cdf(lemma_lb_cdf(0.2), 0.0, 0.8, 50)
    assert d.atoms[0] == (0.0, 0.2)
    assert d.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_discretize_two_point_uniform():
    d = discretize_cdf(lambda b: b, 0.0, 1.0, 2)
    assert d.atoms == ((1.0, 1.0),)


def test_discretize_rejects_missing_mass():
    with pytest.raises(ValueError):
        discretize_cdf(lambda b: 0.5 * b, 0.0, 1.0, 10)
    with pytest.raises(ValueError):
        discretize_cdf(lambda b: b, 0.0, 1.0, 1)


def test_discretized_mean_converges():
    t = 0.2
    cdf = lemma_lb_cdf(t)
    mean, _ = integrate.quad(lambda b: 1.0 - cdf(b), 0.0, 1.0 - t, epsabs=1e-13)
    errors = []
    for n in (250, 500, 1000, 2000, 4000):
        d = discretize_cdf(cdf, 0.0, 1.0 - t, n)
        errors.append(abs(float(d.probs @ d.bid_array) - mean))
    assert all(b < a for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 1e-3


def test_random_instance_respects_reserve_accuracy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        inst = random_instance(rng, 3, 3, gamma=0.4)
        top = inst.values.max(axis=0)
        assert np.all(inst.reserves >= 0.4 * top - 1e-12) and np.all(inst.reserves <= top + 1e-12)
    assert random_instance(rng, 2, 2).reserves is None
