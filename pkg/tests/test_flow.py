import datetime as dt
import io

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hydrodp.flow import (
    FlowDataError,
    FlowSeries,
    MeanFlowProfile,
    build_mean_profile,
    day_of_year,
    load_flow_csv,
    project_flow,
    read_profile_csv,
    splice_forecast,
    write_flow_csv,
    write_profile_csv,
)
from hydrodp.synth import base_profile, synth_flows


def csv_bytes(rows):
    return ("date,flow_m3s\n" + "\n".join(rows) + "\n").encode()


# -- ingestion ---------------------------------------------------------------


def test_load_two_rows():
    series = load_flow_csv(io.BytesIO(csv_bytes(["2015-01-01,3.2", "2015-01-02,3.4"])))
    assert series.start_date == dt.date(2015, 1, 1)
    assert list(series.values) == [3.2, 3.4]


def test_negative_flow_names_line_and_value():
    with pytest.raises(FlowDataError, match=r"line 3.*-1\.0"):
        load_flow_csv(csv_bytes(["2015-01-01,3.2", "2015-01-02,-1.0"]))


def test_leap_day_dropped():
    series = load_flow_csv(csv_bytes(["2016-02-28,1.0", "2016-02-29,2.0", "2016-03-01,3.0"]))
    assert list(series.values) == [1.0, 3.0]
    assert series.dates() == [dt.date(2016, 2, 28), dt.date(2016, 3, 1)]


@pytest.mark.parametrize(
    "rows, pattern",
    [
        (["2015-01-01,3.2", "2015-01-01,3.3"], r"line 3: duplicate"),
        (["2015-01-02,3.2", "2015-01-01,3.3"], r"line 3: out-of-order"),
        (["2015-01-01,3.2", "2015-01-03,3.3"], r"line 3: gap"),
        (["2015-01-01,abc"], r"line 2: bad flow"),
        (["20150101,1.0"], r"line 2: bad date"),
        (["2015-01-01,1.0,7"], r"line 2: expected 2 fields"),
    ],
)
def test_malformed_rows(rows, pattern):
    with pytest.raises(FlowDataError, match=pattern):
        load_flow_csv(csv_bytes(rows))


def test_bad_header():
    with pytest.raises(FlowDataError, match="line 1"):
        load_flow_csv(b"when,flow\n2015-01-01,1\n")


def test_csv_round_trip():
    series = synth_flows(3, 2, 2015)
    buf = io.StringIO()
    write_flow_csv(series, buf)
    back = load_flow_csv(buf.getvalue().encode())
    assert back.start_date == series.start_date
    np.testing.assert_array_equal(back.values, series.values)


def test_day_of_year_skips_leap_day():
    assert day_of_year(dt.date(2016, 3, 1)) == 59
    assert day_of_year(dt.date(2015, 12, 31)) == 364


def test_split_years():
    series = synth_flows(5, 3, 2015)
    years = series.split_years()
    assert sorted(years) == [2015, 2016, 2017]
    assert all(len(v) == 365 for v in years.values())


# -- mean profile ------------------------------------------------------------


def year_of(value):
    return FlowSeries(dt.date(2001, 1, 1), np.full(365, value))


def brute_moving_average(x, window):
    half = window // 2
    return np.array([sum(x[(d + k) % 365] for k in range(-half, half + 1)) / window
                     for d in range(365)])


def test_constant_profile():
    profile = build_mean_profile([year_of(7.0)], 7)
    np.testing.assert_allclose(profile.values, 7.0, rtol=1e-14)


def test_across_year_mean():
    profile = build_mean_profile([year_of(4.0), year_of(8.0)], 1)
    np.testing.assert_array_equal(profile.values, 6.0)


def test_multi_year_history_is_split_by_year():
    series = FlowSeries(dt.date(2001, 1, 1), np.concatenate([np.full(365, 4.0), np.full(365, 8.0)]))
    np.testing.assert_array_equal(build_mean_profile([series], 1).values, 6.0)


@pytest.mark.parametrize("spike_day", [100, 0, 363])
def test_spike_spreads_over_window(spike_day):
    flows = np.zeros(365)
    flows[spike_day] = 365.0
    profile = build_mean_profile([FlowSeries(dt.date(2001, 1, 1), flows)], 7)
    expected = brute_moving_average(flows, 7)
    np.testing.assert_allclose(profile.values, expected, atol=1e-12)
    assert np.count_nonzero(profile.values > 1e-12) == 7
    np.testing.assert_allclose(profile.values[profile.values > 1e-12], 365 / 7)
    assert profile.values.sum() == pytest.approx(365.0)


def test_mid_year_start_aligns_days():
    flows = np.zeros(365)
    flows[0] = 1.0  # the first value is Jul 1
    series = FlowSeries(dt.date(2001, 7, 1), flows)
    profile = build_mean_profile([series], 1)
    assert profile.values[day_of_year(dt.date(2001, 7, 1))] == 1.0


def test_profile_errors():
    with pytest.raises(FlowDataError):
        build_mean_profile([], 7)
    with pytest.raises(FlowDataError, match="multiple of 365"):
        build_mean_profile([FlowSeries(dt.date(2001, 1, 1), np.ones(400))], 7)
    with pytest.raises(ValueError):
        build_mean_profile([year_of(1.0)], 4)


def test_profile_csv_round_trip():
    profile = MeanFlowProfile(base_profile())
    buf = io.StringIO()
    write_profile_csv(profile, buf)
    buf.seek(0)
    np.testing.assert_allclose(read_profile_csv(buf).values, profile.values, atol=1e-6)


# -- projections -------------------------------------------------------------


@pytest.fixture
def profile():
    return MeanFlowProfile(base_profile())


def test_zero_deviation_reproduces_profile(profile):
    proj = project_flow(profile, 40, profile.values[40], 10, 365)
    np.testing.assert_allclose(proj.values, profile.at(40 + np.arange(365)), rtol=1e-15)


def test_half_life(profile):
    q = profile.values
    proj = project_flow(profile, 50, q[50] + 8.0, 10, 30)
    assert proj.values[0] - q[50] == pytest.approx(8.0)
    assert proj.values[10] - q[60] == pytest.approx(4.0)
    assert proj.values[20] - q[70] == pytest.approx(8.0 * 2**-2)


def test_projection_wraps_year_end(profile):
    proj = project_flow(profile, 360, profile.values[360], 10, 10)
    np.testing.assert_allclose(proj.values[5:], profile.values[:5])


def test_projection_floored_at_zero():
    q = np.full(365, 1.0)
    q[100:] = 0.2
    proj = project_flow(MeanFlowProfile(q), 99, 0.0, 50, 10)
    assert proj.values[0] == 0.0
    assert np.all(proj.values[1:] == 0.0)


def test_projection_preconditions(profile):
    with pytest.raises(ValueError):
        project_flow(profile, 0, 1.0, 0, 10)
    with pytest.raises(ValueError):
        project_flow(profile, 0, 1.0, 10, 0)


def test_splice_empty_is_identity(profile):
    proj = project_flow(profile, 10, 20.0, 10, 100)
    assert splice_forecast(proj, [], 0) is proj


def test_splice_full_horizon_is_forecast(profile):
    actual = synth_flows(9, 1).values
    proj = project_flow(profile, 0, actual[0], 10, 365)
    spliced = splice_forecast(proj, actual, 365)
    np.testing.assert_array_equal(spliced.values, actual)


def test_splice_restarts_reversion_at_last_forecast(profile):
    q = profile.values
    anchor = 80
    proj = project_flow(profile, anchor, q[anchor], 10, 40)
    spliced = splice_forecast(proj, [q[anchor] + 6.0], 1)
    assert spliced.values[0] == q[anchor] + 6.0
    # the last forecast day is the new anchor: half the deviation 10 days later
    assert spliced.values[10] - q[anchor + 10] == pytest.approx(3.0)
    assert spliced.values[20] - q[anchor + 20] == pytest.approx(1.5)


def test_splice_short_forecast_rejected(profile):
    proj = project_flow(profile, 0, 1.0, 10, 20)
    with pytest.raises(ValueError, match="fewer than M"):
        splice_forecast(proj, [1.0, 2.0], 3)


flows_st = st.floats(0.0, 80.0, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(anchor=st.integers(0, 364), extra=st.floats(0.0, 50.0), half_life=st.floats(0.5, 60.0))
def test_deviation_decays_monotonically(anchor, extra, half_life):
    profile = MeanFlowProfile(base_profile())
    proj = project_flow(profile, anchor, profile.values[anchor] + extra, half_life, 120)
    dev = np.abs(proj.values - profile.at(anchor + np.arange(120)))
    assert np.all(np.diff(dev) <= 1e-12)
    assert np.all(proj.values >= 0)


@settings(max_examples=60, deadline=None)
@given(anchor=st.integers(0, 364), flow=flows_st, half_life=st.floats(0.5, 60.0),
       M=st.integers(0, 60))
def test_splice_with_own_projection_is_identity(anchor, flow, half_life, M):
    profile = MeanFlowProfile(base_profile())
    proj = project_flow(profile, anchor, flow, half_life, 60)
    # a floored day carries no deviation to restart from
    assume(np.all(proj.values > 0))
    spliced = splice_forecast(proj, proj.values[:M], M)
    np.testing.assert_allclose(spliced.values, proj.values, rtol=1e-12, atol=1e-12)
    assert np.all(spliced.values >= 0)


@settings(max_examples=40, deadline=None)
@given(anchor=st.integers(0, 364), half_life=st.floats(0.5, 100.0))
def test_zero_deviation_identity_any_half_life(anchor, half_life):
    profile = MeanFlowProfile(base_profile())
    proj = project_flow(profile, anchor, profile.values[anchor], half_life, 365)
    np.testing.assert_array_equal(proj.values, profile.at(anchor + np.arange(365)))
