"""Tests for randomized bidding: realized strategies, closed-form bounds, the
bound optimizer, the hard-instance distribution, and comparison curves."""

import math

import numpy as np
import pytest

from bidsynth import (
    AdversaryParams,
    BidSequence,
    LowerBoundParams,
    RandParams,
    ValidationError,
    adversary_expected_ratio,
    adversary_integral_check,
    adversary_sample,
    cons_bound,
    det_pareto_cons,
    lower_bound_curve,
    mc_ratio,
    optimize_rstar,
    realize,
    rob_bound,
)

E = math.e


# =========================================================================
# parameters and realization
# =========================================================================

def test_rand_params_validation():
    RandParams(0.0, 1.5)
    RandParams(0.999999, 20.0)
    with pytest.raises(ValidationError, match="delta outside"):
        RandParams(1.0, 2.0)
    with pytest.raises(ValidationError, match="delta outside"):
        RandParams(-0.1, 2.0)
    with pytest.raises(ValidationError, match="a must exceed 1"):
        RandParams(0.5, 1.0)


def test_realize_examples():
    rng = np.random.default_rng(0)
    s = realize(10.0, RandParams(0.5, 2.0), rng)
    assert s.j == 2
    assert s.lam == pytest.approx(10.0 / 2**2.5, rel=1e-12)

    s = realize(E**3, RandParams(0.0, E), rng)
    assert s.j == 3
    assert s.lam == pytest.approx(1.0, rel=1e-12)


def test_realize_reconstructs_and_covers():
    rng = np.random.default_rng(1)
    for u_hat in (1.0, 7.3, 123.4, 1e4):
        for p in (RandParams(0.0, 2.0), RandParams(0.9, 3.0), RandParams(0.3, E)):
            s = realize(u_hat, p, rng)
            assert s.lam * p.a ** (s.j + p.delta) == pytest.approx(u_hat, rel=1e-9)
            assert p.delta <= s.s < 1.0
            assert s.bid(s.j) >= u_hat * (1 - 1e-12)


def test_realize_rejects_small_prediction():
    with pytest.raises(ValidationError, match="below 1"):
        realize(0.5, RandParams(0.0, 2.0), np.random.default_rng(0))


def test_realized_cost_covers_target():
    rng = np.random.default_rng(2)
    s = realize(50.0, RandParams(0.25, 2.0), rng)
    for u in (1.0, 3.7, 50.0, 1234.5):
        # the covering bid is part of the bi-infinite geometric total
        c = s.cost(u)
        assert c >= u
        assert c == pytest.approx(s.bid(math.ceil(math.log(u / s.lam, s.a) - s.s))
                                  * s.a / (s.a - 1.0))


# =========================================================================
# closed-form bounds
# =========================================================================

def test_bounds_delta_zero():
    for a in (1.5, 2.0, E, 4.0):
        p = RandParams(0.0, a)
        assert cons_bound(p) == pytest.approx(a / math.log(a), rel=1e-12)
        assert rob_bound(p) == pytest.approx(a / math.log(a), rel=1e-12)


def test_bounds_delta_one_limits():
    p = RandParams(1.0 - 1e-13, 2.0)
    assert rob_bound(p) == pytest.approx(4.0, rel=1e-9)
    assert cons_bound(p) == pytest.approx(2.0, rel=1e-9)


def test_bounds_midpoint_value():
    # direct expectation at (0.5, e): written-out form of the general bound
    p = RandParams(0.5, E)
    want = E * (E - math.sqrt(E)) / (math.sqrt(E) * (E - 1.0) * 0.5 * 1.0)
    assert cons_bound(p) == pytest.approx(want, rel=1e-12)
    assert cons_bound(p) == pytest.approx(2.0525238789, rel=1e-9)


def test_bounds_relation_and_monotonicity():
    for a in (1.5, 2.5, 6.0):
        last_rob = 0.0
        for d in (0.0, 0.2, 0.4, 0.6, 0.8, 0.95):
            p = RandParams(d, a)
            assert rob_bound(p) == pytest.approx(cons_bound(p) * a**d, rel=1e-12)
            assert rob_bound(p) >= last_rob - 1e-12
            last_rob = rob_bound(p)


# =========================================================================
# the optimizer
# =========================================================================

def test_optimize_rstar_r4():
    res = optimize_rstar(4.0)
    assert res.cons_star == pytest.approx(1.6948078291, abs=1e-3)
    assert res.delta_star == pytest.approx(0.7987048055, abs=1e-3)
    assert res.a_star == pytest.approx(2.9304233708, abs=1e-3)
    assert rob_bound(RandParams(res.delta_star, res.a_star)) <= 4.0 + 1e-6


def test_optimize_rstar_r45_and_r5():
    res = optimize_rstar(4.5)
    assert res.a_star == pytest.approx(3.0, abs=1e-3)
    assert res.cons_star == pytest.approx(1.5, abs=1e-3)
    assert rob_bound(RandParams(res.delta_star, res.a_star)) <= 4.5 + 1e-6

    res = optimize_rstar(5.0)
    assert res.a_star == pytest.approx((5 + math.sqrt(5)) / 2, abs=1e-3)
    assert res.cons_star == pytest.approx(1.3819660113, abs=1e-3)


def test_optimize_rstar_at_e():
    res = optimize_rstar(E + 1e-9)
    assert res.cons_star == pytest.approx(E, abs=1e-2)
    with pytest.raises(ValidationError, match="robustness below e"):
        optimize_rstar(2.0)


def test_optimize_rstar_never_beats_deterministic():
    for r in (4.0, 4.5, 5.0, 6.0, 8.0, 12.0):
        assert optimize_rstar(r).cons_star <= det_pareto_cons(r) + 1e-6


def test_lower_bound_below_rstar():
    for r in np.linspace(E + 0.1, 12.0, 12):
        assert lower_bound_curve(r) <= optimize_rstar(r).cons_star + 1e-3


# =========================================================================
# Monte Carlo
# =========================================================================

def test_mc_matches_e_at_large_target():
    rng = np.random.default_rng(7)
    mean, half = mc_ratio(1e4, RandParams(0.0, E), 1e4, 100_000, rng)
    assert abs(mean - E) <= 0.01


def test_mc_single_trial_deterministic():
    a = mc_ratio(100.0, RandParams(0.2, 2.0), 37.0, 1, np.random.default_rng(5))
    b = mc_ratio(100.0, RandParams(0.2, 2.0), 37.0, 1, np.random.default_rng(5))
    assert a == b
    assert a[1] == 0.0


def test_mc_respects_closed_form_bounds():
    rng = np.random.default_rng(11)
    u_hat = 315.7
    for d in (0.0, 0.25, 0.5, 0.75, 0.9):
        for a in (1.5, 2.0, E, 4.0):
            p = RandParams(d, a)
            mean, half = mc_ratio(u_hat, p, u_hat, 20_000, rng)
            assert mean <= cons_bound(p) + 3 * half + 1e-9
            rb = rob_bound(p)
            for u in np.geomspace(1.0, u_hat * a**2, 12):
                mean, half = mc_ratio(u_hat, p, float(u), 4_000, rng)
                assert mean <= rb + 3 * half + 1e-9


# =========================================================================
# hard-instance distribution
# =========================================================================

def test_adversary_params():
    adv = AdversaryParams(0.5)
    assert adv.R == pytest.approx(E)
    with pytest.raises(ValidationError, match="epsilon outside"):
        AdversaryParams(0.0)
    with pytest.raises(ValidationError, match="epsilon outside"):
        AdversaryParams(1.0)


def test_adversary_single_bid_closed_value():
    got = adversary_expected_ratio(BidSequence((E,)), AdversaryParams(0.5))
    assert got == pytest.approx(0.5 * E, abs=1e-12)


def test_adversary_equal_ratio_equality():
    for eps, n in ((0.5, 1), (0.1, 9), (0.01, 99)):
        X = BidSequence(tuple(E ** (i + 1) for i in range(n)))
        got = adversary_expected_ratio(X, AdversaryParams(eps))
        assert got == pytest.approx((1 - eps) * E, rel=1e-9)


def test_adversary_lower_bound_random_strategies():
    rng = np.random.default_rng(13)
    for eps in (0.5, 0.1, 0.01):
        adv = AdversaryParams(eps)
        for _ in range(100):
            bids = [float(rng.uniform(1.0, 3.0))]
            while bids[-1] < adv.R:
                bids.append(bids[-1] * float(rng.uniform(1.2, 6.0)))
            got = adversary_expected_ratio(BidSequence(tuple(bids)), adv)
            assert got >= (1 - eps) * E - 1e-9


def test_adversary_integral_cross_check():
    rng = np.random.default_rng(17)
    for eps in (0.5, 0.2, 0.05):
        adv = AdversaryParams(eps)
        for _ in range(20):
            bids = [float(rng.uniform(1.0, 2.5))]
            while bids[-1] < adv.R:
                bids.append(bids[-1] * float(rng.uniform(1.3, 4.0)))
            X = BidSequence(tuple(bids))
            a = adversary_expected_ratio(X, adv)
            b = adversary_integral_check(X, adv)
            assert a == pytest.approx(b, rel=1e-6)


def test_adversary_handles_extension_and_unreachable():
    got = adversary_expected_ratio(
        BidSequence((2.0,), extended=True, r=5), AdversaryParams(0.5)
    )
    assert got >= 0.5 * E - 1e-9
    with pytest.raises(ValidationError, match="does not reach R"):
        adversary_expected_ratio(BidSequence((1.0, 2.0)), AdversaryParams(0.01))


def test_adversary_sampler_shape():
    rng = np.random.default_rng(3)
    adv = AdversaryParams(0.3)
    u = adversary_sample(adv, 200_000, rng)
    assert u.min() >= 1.0
    assert u.max() <= adv.R
    atom_frac = float((u == adv.R).mean())
    assert atom_frac == pytest.approx(0.3, abs=0.01)
    # continuous part has density eps/t: mass of [1, sqrt(R)] is half of 1-eps
    inner = float(((u < adv.R) & (u <= math.sqrt(adv.R))).mean())
    assert inner == pytest.approx(0.35, abs=0.01)


def test_adversary_sampled_cost_matches_expected_ratio():
    # the closed form describes the strategy truncated/clamped at R;
    # sampled costs of that clamped strategy must agree with it
    rng = np.random.default_rng(29)
    adv = AdversaryParams(0.2)
    X = BidSequence((1.5,), extended=True, r=6)
    bids = []
    i = 0
    while X.bid(i) < adv.R:
        bids.append(X.bid(i))
        i += 1
    clamped = BidSequence(tuple(bids + [adv.R]))
    closed = adversary_expected_ratio(X, adv)
    u = adversary_sample(adv, 20_000, rng)
    from bidsynth import bidding_cost

    ratios = np.array([bidding_cost(clamped, float(t)) / float(t) for t in u])
    assert ratios.mean() == pytest.approx(closed, rel=0.02)


# =========================================================================
# curves
# =========================================================================

def test_lower_bound_curve_values():
    assert lower_bound_curve(4.0, LowerBoundParams(1e-6)) == pytest.approx(
        1.1299, abs=1e-3
    )
    assert lower_bound_curve(E + 0.01) > 1.0
    assert lower_bound_curve(1e6) == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(ValidationError, match="r too small"):
        lower_bound_curve(E)
    with pytest.raises(ValidationError, match="must be positive"):
        LowerBoundParams(0.0)


def test_det_pareto_cons_values():
    assert det_pareto_cons(4.0) == 2.0
    assert det_pareto_cons(4.5) == pytest.approx(1.5, rel=1e-12)
    assert det_pareto_cons(1e6) == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(ValidationError, match="r below 4"):
        det_pareto_cons(3.9)


def test_det_pareto_decreasing():
    rs = np.linspace(4.0, 12.0, 30)
    vals = [det_pareto_cons(float(r)) for r in rs]
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
