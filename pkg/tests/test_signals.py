import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from capmon.errors import InvalidWindow
from capmon.signals import (
    NO_TRANSITIONS,
    CapacitorParams,
    ReferenceParams,
    SamplingWindow,
    capacitor_current,
    read_window_csv,
    validate_window,
    window_to_csv,
)


def make_window(v_sm=None, v_sw=None, i_arm=None, n=1000, ts=10e-6):
    rng = np.random.default_rng(1)
    if v_sw is None:
        v_sw = (np.arange(n) // 7) % 2
    n = len(v_sw)
    if v_sm is None:
        v_sm = 30.0 + rng.normal(0, 0.1, n)
    if i_arm is None:
        i_arm = rng.normal(0, 5, n)
    return SamplingWindow(t0=0.0, ts=ts, v_sm=v_sm, v_sw=v_sw, i_arm=i_arm)


def codes(window):
    return [v.code for v in validate_window(window).violations]


def test_valid_window_ok():
    res = validate_window(make_window())
    assert res.ok and res.warnings == ()


def test_non_binary_switching_is_violation():
    v_sw = np.zeros(1000)
    v_sw[10] = 0.5
    res = validate_window(make_window(v_sw=v_sw))
    assert not res.ok
    assert [v.message for v in res.violations] == ["non-binary switching state"]


def test_all_zero_switching_warns():
    res = validate_window(make_window(v_sw=np.zeros(1000, int)))
    assert res.ok
    assert res.warnings == (NO_TRANSITIONS,)
    assert not res.esr_observable


@pytest.mark.parametrize(
    "kwargs, code",
    [
        (dict(v_sm=np.ones(5), v_sw=np.ones(4), i_arm=np.ones(5)), "length_mismatch"),
        (dict(v_sm=[1.0], v_sw=[1], i_arm=[1.0]), "too_short"),
        (dict(v_sm=[1.0, np.nan], v_sw=[1, 0], i_arm=[1.0, 1.0]), "non_finite"),
        (dict(v_sm=[1.0, 1.0], v_sw=[1, 0], i_arm=[np.inf, 1.0]), "non_finite"),
        (dict(v_sm=[0.0, -1.0], v_sw=[1, 0], i_arm=[1.0, 1.0]), "non_positive_vmax"),
    ],
)
def test_violation_codes(kwargs, code):
    assert code in codes(make_window(**kwargs))


def test_non_positive_ts():
    w = SamplingWindow(0.0, 0.0, [1.0, 2.0], [0, 1], [1.0, 1.0])
    assert "non_positive_ts" in codes(w)


def test_window_is_read_only():
    w = make_window()
    with pytest.raises(ValueError):
        w.v_sm[0] = 1.0


def test_capacitor_current_examples():
    w = SamplingWindow(0.0, 1.0, [1.0, 1.0, 1.0], [0, 1, 0], [2.0, 2.0, 2.0])
    np.testing.assert_array_equal(capacitor_current(w), [0.0, 2.0, 0.0])
    w = SamplingWindow(0.0, 1.0, [1.0, 1.0], [1, 1], [-3.0, 4.0])
    np.testing.assert_array_equal(capacitor_current(w), [-3.0, 4.0])
    w = make_window(v_sw=np.ones(50, int))
    np.testing.assert_array_equal(capacitor_current(w), w.i_arm)


def test_capacitor_current_rejects_invalid():
    w = make_window(v_sw=np.full(10, 0.5))
    with pytest.raises(InvalidWindow) as err:
        capacitor_current(w)
    assert err.value.code == "non_binary_switching"


@given(
    hnp.arrays(float, 64, elements=st.floats(-1e4, 1e4)),
    hnp.arrays(np.int8, 64, elements=st.integers(0, 1)),
)
def test_gating_bounded_and_idempotent(i_arm, v_sw):
    w = SamplingWindow(0.0, 1e-5, np.full(64, 10.0), v_sw, i_arm)
    i_c = capacitor_current(w)
    assert np.all(np.abs(i_c) <= np.abs(i_arm))
    again = SamplingWindow(0.0, 1e-5, np.full(64, 10.0), v_sw, i_c)
    np.testing.assert_array_equal(capacitor_current(again), i_c)


def test_params_invariants():
    with pytest.raises(ValueError):
        CapacitorParams(0.0, 0.01)
    with pytest.raises(ValueError):
        CapacitorParams(1e-3, -0.01)
    CapacitorParams(1e-3, 0.0)
    with pytest.raises(ValueError):
        ReferenceParams(1e-3, 0.0)


def test_csv_round_trip(tmp_path):
    w = make_window()
    path = tmp_path / "w.csv"
    path.write_text(window_to_csv(w))
    back = read_window_csv(path)
    np.testing.assert_array_equal(back.v_sm, w.v_sm)
    np.testing.assert_array_equal(back.v_sw, w.v_sw)
    np.testing.assert_array_equal(back.i_arm, w.i_arm)
    assert back.ts == pytest.approx(w.ts, rel=1e-12)
    assert back.window_id == "w"
    assert path.read_text().splitlines()[0] == "t,v_sm,v_sw,i_arm"


def test_csv_rejects_bad_header(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("time,v,s,i\n0,1,0,1\n1,1,0,1\n")
    with pytest.raises(InvalidWindow) as err:
        read_window_csv(path)
    assert err.value.code == "bad_csv"


def test_csv_rejects_non_uniform_time(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("t,v_sm,v_sw,i_arm\n0,1,0,1\n1e-5,1,1,1\n2.5e-5,1,0,1\n")
    with pytest.raises(InvalidWindow) as err:
        read_window_csv(path)
    assert err.value.code == "non_uniform_time"


def test_csv_keeps_non_binary_for_validation(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("t,v_sm,v_sw,i_arm\n0,1,0,1\n1e-5,1,0.5,1\n2e-5,1,1,1\n")
    w = read_window_csv(path)
    assert codes(w) == ["non_binary_switching"]
