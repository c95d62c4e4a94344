"""Tests for contract scheduling: epoch synthesis LPs, acceleration ratio, and
multi-epoch scenarios."""

import math

import pytest

from bidsynth import (
    EpochResult,
    ScheduleState,
    ValidationError,
    acceleration_ratio,
    run_scenario,
    scenario_from_json,
    schedule_update,
    zeta_roots,
)


# =========================================================================
# state
# =========================================================================

def test_fresh_state():
    st = ScheduleState.fresh(4)
    assert st.contracts == ()
    assert st.T_now == 0.0
    assert st.last == 1.0  # virtual unit contract


def test_state_accumulates():
    st = ScheduleState.fresh(4).advance((2.0, 6.0)).advance((10.0, 22.0))
    assert st.contracts == (2.0, 6.0, 10.0, 22.0)
    assert st.T_now == pytest.approx(40.0)
    assert st.last == 22.0


def test_state_validation():
    with pytest.raises(ValidationError, match="r below 4"):
        ScheduleState.fresh(3.0)
    with pytest.raises(ValidationError, match="non-positive"):
        ScheduleState(r=4, epochs=((1.0, -2.0),))
    with pytest.raises(ValidationError, match="increase within"):
        ScheduleState(r=4, epochs=((3.0, 2.0),))
    with pytest.raises(ValidationError, match="empty epoch"):
        ScheduleState(r=4, epochs=((),))


# =========================================================================
# schedule_update
# =========================================================================

def test_fresh_update_u8():
    res = schedule_update(ScheduleState.fresh(4), 8.0)
    assert res.contracts == pytest.approx((2.0, 6.0), abs=1e-8)
    assert res.consistency == pytest.approx(4 / 3, rel=1e-9)


def test_fresh_update_u4():
    res = schedule_update(ScheduleState.fresh(4), 4.0)
    assert res.contracts == pytest.approx((4.0,), abs=1e-8)
    assert res.consistency == pytest.approx(1.0, rel=1e-9)


def test_second_epoch_carry_over_cap():
    st = ScheduleState.fresh(4).advance((2.0, 6.0))
    res = schedule_update(st, 40.0)
    # carry-over cap x_0 <= 4*6 - 8 = 16; optimum stops below it
    assert res.contracts == pytest.approx((10.0, 22.0), abs=1e-7)
    assert res.consistency == pytest.approx(40 / 22, rel=1e-9)


def test_third_epoch():
    st = ScheduleState.fresh(4).advance((2.0, 6.0)).advance((10.0, 22.0))
    res = schedule_update(st, 200.0)
    assert res.contracts == pytest.approx((48.0, 104.0), abs=1e-6)


def test_update_rejects_stale_prediction():
    st = ScheduleState.fresh(4).advance((2.0, 6.0))
    with pytest.raises(ValidationError, match="exceed current time"):
        schedule_update(st, 8.0)


def test_update_infeasible_state():
    # so much time spent relative to the last contract that x_0 <= r*last - T
    # admits nothing
    st = ScheduleState(r=4, epochs=((10.0, 11.0), (0.5,)))
    with pytest.raises(ValidationError, match="infeasible update"):
        schedule_update(st, 30.0)


def test_epoch_prefix_is_offset_robust():
    # each epoch prefix satisfies the bidding-style inequalities with T offset
    results, state = run_scenario(4, [8.0, 40.0, 200.0])
    T = 0.0
    for res in results:
        xs = res.contracts
        total = T
        for i, x in enumerate(xs):
            if i >= 1:
                assert xs[i] <= 4 * xs[i - 1] - total + 1e-6
            total += x
        T = total


def test_single_prediction_brute_force_consistency():
    # grid search over 2- and 3-contract prefixes never beats the LP answer
    r = 4.0
    z2 = zeta_roots(r).zeta2
    step = 1.0 / 32.0
    for u_hat in (6.0, 8.0, 14.0):
        lp_cons = schedule_update(ScheduleState.fresh(r), u_hat).consistency
        best = math.inf
        x0 = step
        while x0 <= r + 1e-12:
            # two contracts: pick the largest feasible x_1
            x1 = min(r * x0 - x0, u_hat - x0)
            if x1 >= x0 and x1 >= (x0) / (z2 - 1.0) - 1e-12:
                best = min(best, u_hat / x1)
            # three contracts: grid x_1, closed-form best x_2
            x1g = x0
            while x1g <= min(r * x0 - x0, u_hat) + 1e-12:
                x2 = min(r * x1g - x0 - x1g, u_hat - x0 - x1g)
                if x2 >= x1g and x2 >= (x0 + x1g) / (z2 - 1.0) - 1e-12:
                    best = min(best, u_hat / x2)
                x1g += step
            x0 += step
        assert lp_cons <= best + 2e-2


# =========================================================================
# acceleration ratio
# =========================================================================

def test_acceleration_examples():
    assert acceleration_ratio((1, 2)) == pytest.approx(3.0)
    assert acceleration_ratio((1, 2, 4)) == pytest.approx(3.5)


def test_acceleration_doubling_approaches_4():
    prev = 0.0
    for L in (4, 6, 8, 10, 12):
        val = acceleration_ratio([2**i for i in range(L + 1)])
        assert prev < val < 4.0
        prev = val
    assert val == pytest.approx(4.0, abs=2e-3)


def test_acceleration_base3_limit():
    val = acceleration_ratio([3**i for i in range(14)])
    assert val == pytest.approx(4.5, abs=1e-4)


def test_acceleration_virtual_unit_small_schedule():
    # before any completion the largest completed contract is the virtual 1
    assert acceleration_ratio((0.5, 0.75)) == pytest.approx(1.25)


def test_acceleration_validation():
    with pytest.raises(ValidationError, match="at least two"):
        acceleration_ratio((3.0,))
    with pytest.raises(ValidationError, match="non-positive"):
        acceleration_ratio((1.0, 0.0))


# =========================================================================
# scenarios
# =========================================================================

def test_scenario_three_epochs_robust():
    results, state = run_scenario(4, [8.0, 40.0, 200.0])
    assert [r.contracts for r in results] == [
        pytest.approx((2.0, 6.0), abs=1e-7),
        pytest.approx((10.0, 22.0), abs=1e-7),
        pytest.approx((48.0, 104.0), abs=1e-6),
    ]
    assert acceleration_ratio(state.contracts) <= 4.0 + 1e-6


def test_scenario_other_budgets():
    for r in (4.5, 6.0, 9.0):
        results, state = run_scenario(r, [5.0, 30.0, 500.0])
        assert acceleration_ratio(state.contracts) <= r + 1e-6
        for res in results:
            assert res.consistency >= 1.0 - 1e-9


def test_scenario_json():
    r, u_hats = scenario_from_json(
        '{"r": 4, "predictions": [{"u_hat": 8}, {"u_hat": 40}]}'
    )
    assert r == 4.0
    assert u_hats == [8.0, 40.0]
    with pytest.raises(ValidationError, match="malformed"):
        scenario_from_json('{"r": 4}')
