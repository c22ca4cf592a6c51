import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hydrodp.plant import (
    DamPlantSpec,
    EfficiencyParams,
    ReservoirSpec,
    RoRPlantSpec,
    efficiency,
    head_from_volume,
    mode_flow,
    payoff_dam,
    payoff_ror,
    reference_profit,
    running_payoff_dam,
    split_payoff_ror,
    step_reservoir,
    switch_cost,
    switch_cost_matrix,
    unit_payoff_ror,
    volume_from_head,
)

EFF = EfficiencyParams()
DAM = DamPlantSpec.with_dam_days(30)
ROR = RoRPlantSpec()
RES = DAM.reservoir


def eta(f):
    return 0.92 - 0.45 * (f / 10 - 1) ** 2


def phi1_hourly(f):
    """One RoR unit, branch by branch, at price 1 and 5 m head."""
    if f < 5:
        return -100 - 1000
    f = min(f, 13.0)
    return -100 + 1000 * 9.82 * 5 * eta(f) * f / 1000


# -- efficiency and modes ------------------------------------------------------


@pytest.mark.parametrize("flow, expected", [(10, 0.92), (5, 0.8075), (13, 0.8795)])
def test_efficiency_values(flow, expected):
    assert efficiency(flow, EFF) == pytest.approx(expected, abs=1e-15)


@given(st.floats(0.0, 10.0))
def test_efficiency_peak_and_symmetry(d):
    assert efficiency(10 + d, EFF) == pytest.approx(efficiency(10 - d, EFF), abs=1e-12)
    assert efficiency(10 + d, EFF) <= 0.92


@pytest.mark.parametrize("mode, flow", [(0, 0.0), (1, 5.0), (11, 13.0), (6, 9.0)])
def test_mode_flow(mode, flow):
    assert mode_flow(mode, DAM) == pytest.approx(flow, abs=1e-12)


def test_mode_flow_out_of_range():
    with pytest.raises(ValueError):
        mode_flow(12, DAM)


def test_efficiency_positive_on_operating_range():
    flows = np.linspace(5, 13, 200)
    assert np.all(efficiency(flows, EFF) > 0)


# -- reservoir -----------------------------------------------------------------


def test_reservoir_volume_from_dam_days():
    assert RES.v_max == 10 * 86400 * 30
    assert RES.dam_days(10.0) == pytest.approx(30.0)


@pytest.mark.parametrize("frac, head", [(1.0, 5.0), (1 / 8, 2.5), (0.0, 0.0)])
def test_head_from_volume(frac, head):
    assert head_from_volume(frac * RES.v_max, RES) == pytest.approx(head, abs=1e-12)


def test_head_from_volume_range():
    with pytest.raises(ValueError):
        head_from_volume(RES.v_max * 1.01, RES)
    with pytest.raises(ValueError):
        head_from_volume(-1.0, RES)


def test_head_strictly_increasing_and_round_trip():
    levels = 1000
    volumes = np.linspace(0, RES.v_max, levels + 1)
    heads = head_from_volume(volumes, RES)
    assert np.all(np.diff(heads) > 0)
    back = volume_from_head(heads, RES)
    assert np.max(np.abs(back - volumes)) < RES.v_max / levels


def test_step_balance():
    assert step_reservoir(5e5, 7.0, 7.0, RES) == (5e5, 0.0)


def test_step_spill_when_full():
    vol, spill = step_reservoir(RES.v_max, 10.0, 0.0, RES, 1)
    assert vol == RES.v_max
    assert spill == 864000.0


def test_step_clamps_at_empty():
    vol, spill = step_reservoir(100000.0, 0.0, 10.0, RES, 1)
    assert vol == 0.0
    assert spill == 0.0


@given(vol=st.floats(0, 1), qin=st.floats(0, 100), qout=st.floats(0, 13), dt=st.sampled_from([0.5, 1, 2]))
def test_step_conserves_water(vol, qin, qout, dt):
    v0 = vol * RES.v_max
    new, spill = step_reservoir(v0, qin, qout, RES, dt)
    assert 0 <= new <= RES.v_max and spill >= 0
    if new > 0:
        assert new + spill - v0 == pytest.approx((qin - qout) * 86400 * dt, rel=1e-9, abs=1e-3)


# -- payoffs -------------------------------------------------------------------


def test_payoff_off_is_zero():
    assert payoff_dam(0, 5.0, 1.0, DAM) == 0.0
    assert payoff_dam(0, 0.0, 1.0, DAM) == 0.0


def test_payoff_empty_dam_penalty():
    for mode in (1, 6, 11):
        assert payoff_dam(mode, 0.0, 1.0, DAM) == pytest.approx(-26400.0)


def test_payoff_at_design_flow_full_head():
    assert running_payoff_dam(10.0, 5.0, 1.0, DAM) == pytest.approx(8441.28, abs=1e-6)


def test_payoff_mode_six():
    expected = 24 * (1000 * 9.82 * 5 * eta(9.0) * 9.0 / 1000 - 100)
    assert payoff_dam(6, 5.0, 1.0, DAM) == pytest.approx(expected, rel=1e-14)


@settings(max_examples=50)
@given(mode=st.integers(1, 11), h1=st.floats(0.01, 5), h2=st.floats(0.01, 5), price=st.floats(0.1, 5))
def test_payoff_increasing_in_head(mode, h1, h2, price):
    lo, hi = sorted((h1, h2))
    if lo < hi:
        assert payoff_dam(mode, lo, price, DAM) < payoff_dam(mode, hi, price, DAM)


def test_payoff_vectorized_matches_scalar():
    heads = np.linspace(0, 5, 11)
    table = payoff_dam(np.arange(12)[None, :], heads[:, None], 1.0, DAM)
    for k, h in enumerate(heads):
        for m in range(12):
            assert table[k, m] == payoff_dam(m, h, 1.0, DAM)


def test_ror_below_min_flow():
    assert payoff_ror(1, 3.0, 1.0, ROR) == pytest.approx(24 * (-100 - 1000))


def test_ror_unit_branches():
    for f in (0.0, 4.99, 5.0, 7.3, 12.99, 13.0, 40.0):
        assert unit_payoff_ror(f, 1.0, ROR) == pytest.approx(phi1_hourly(f), rel=1e-14)


def test_ror_equal_split_at_twice_design_flow():
    deltas = [k / 100 for k in range(101)]
    sums = [phi1_hourly(d * 20) + phi1_hourly((1 - d) * 20) for d in deltas]
    best = int(np.argmax(sums))
    assert deltas[best] == 0.5
    expected = 24 * 2 * (1000 * 9.82 * 5 * 0.92 * 10 / 1000 - 100)
    assert payoff_ror(2, 20.0, 1.0, ROR) == pytest.approx(expected, rel=1e-12)
    assert max(sums) * 24 == pytest.approx(expected, rel=1e-12)


def test_ror_both_units_clamped_at_high_flow():
    flow = 2 * 13.0 + 10
    deltas = np.linspace(0, 1, 101)
    sums = np.array([phi1_hourly(d * flow) + phi1_hourly((1 - d) * flow) for d in deltas])
    plateau = (deltas * flow >= 13) & ((1 - deltas) * flow >= 13)
    assert plateau.any()
    np.testing.assert_allclose(sums[plateau], 2 * phi1_hourly(13.0), rtol=1e-14)
    assert payoff_ror(2, flow, 1.0, ROR) == pytest.approx(24 * 2 * phi1_hourly(13.0), rel=1e-14)


@settings(max_examples=100)
@given(st.floats(0, 60))
def test_ror_two_units_dominates_equal_split(flow):
    assert split_payoff_ror(flow, 1.0, ROR) >= 2 * unit_payoff_ror(flow / 2, 1.0, ROR) - 1e-9


def test_ror_mode_range():
    with pytest.raises(ValueError):
        payoff_ror(3, 10.0, 1.0, ROR)


# -- switching costs -------------------------------------------------------------


D = reference_profit(DAM)


def test_reference_profit_value():
    expected = 365 * 24 * (1000 * 9.82 * 5 * 0.8795 * 13 / 1000 - 100)
    assert D == pytest.approx(expected, rel=1e-14)
    assert D == pytest.approx(4.0417e6, rel=1e-4)
    assert 0.0025 * D == pytest.approx(1.0104e4, rel=1e-4)


def test_reference_profit_hours_per_year():
    # hourly payoff of exactly 1 m.u. at full capacity
    plant = DamPlantSpec.with_dam_days(30, c_run=0.0, h_max=1.0 / (9.82 * 0.8795 * 13))
    assert reference_profit(plant) == pytest.approx(8760.0, rel=1e-12)


@pytest.mark.parametrize("regime", ["dam", "ror"])
def test_switch_cost_diagonal(regime):
    for i in range(3):
        assert switch_cost(i, i, regime, 0.0025, D) == 0.0


def test_switch_cost_dam():
    assert switch_cost(0, 3, "dam", 0.0025, D) == 0.0025 * D
    assert switch_cost(7, 0, "dam", 0.0025, D) == 0.0025 * D
    assert switch_cost(2, 9, "dam", 0.0025, D) == pytest.approx(0.0025 * D / 25)


def test_switch_cost_ror():
    assert switch_cost(0, 1, "ror", 0.0025, D) == 0.0025 * D
    assert switch_cost(2, 1, "ror", 0.0025, D) == 0.0025 * D
    assert switch_cost(0, 2, "ror", 0.0025, D) == 1.5 * 0.0025 * D


def test_switch_cost_invalid_pair():
    with pytest.raises(ValueError):
        switch_cost(0, 3, "ror", 0.0025, D)
    with pytest.raises(ValueError):
        switch_cost(0, 12, "dam", 0.0025, D)


@pytest.mark.parametrize("plant", [DAM, ROR])
def test_switch_cost_matrix_symmetric(plant):
    c = switch_cost_matrix(plant)
    np.testing.assert_array_equal(c, c.T)
    assert np.all(np.diag(c) == 0)


def test_spec_validation():
    with pytest.raises(ValueError):
        DamPlantSpec.with_dam_days(30, gamma=0.5)
    with pytest.raises(ValueError):
        EfficiencyParams(alpha=1.5)
    with pytest.raises(ValueError):
        ReservoirSpec(h_max=0)
    with pytest.raises(ValueError):
        RoRPlantSpec(fixed_head=-1)
