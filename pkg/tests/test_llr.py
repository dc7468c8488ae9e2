import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polar_rcsc.llr import QuantSpec, f_minsum, quantize_channel, sat_add, saturation_bound

INF = math.inf
S7 = saturation_bound(7)
CODES7 = list(range(-S7, S7 + 1)) + [INF, -INF]


def test_bounds():
    assert saturation_bound(5) == 15
    assert S7 == 63
    assert QuantSpec().channel_bound == 15
    assert QuantSpec().internal_bound == 63


def test_f_examples():
    assert f_minsum(2.0, -3.0) == -2.0
    assert f_minsum(S7, 1.5) == 1.5
    assert f_minsum(INF, -4.0) == -4.0
    assert f_minsum(INF, INF) == INF
    assert f_minsum(0.0, -7.0) == 0.0


def test_sat_add_examples():
    assert sat_add(60, 60, 7) == 63
    assert sat_add(-60, -60, 7) == -63
    assert sat_add(3, -5, 7) == -2
    assert sat_add(3.0, -5.0) == -2.0
    assert sat_add(INF, -INF) == 0.0
    assert sat_add(INF, -INF, 7) == 0
    assert sat_add(INF, 40, 7) == INF
    assert sat_add(-INF, 40, 7) == -INF


def test_f_exhaustive_q7():
    for a in CODES7:
        for b in CODES7:
            r = f_minsum(a, b)
            assert r == f_minsum(b, a)
            assert abs(r) == min(abs(a), abs(b))
            if r != 0:
                assert (r < 0) == ((a < 0) != (b < 0))


def test_sat_add_exhaustive_q7():
    for a in CODES7:
        for b in CODES7:
            r = sat_add(a, b, 7)
            assert r == sat_add(b, a, 7)
            if math.isinf(a) or math.isinf(b):
                continue
            assert -S7 <= r <= S7
            assert r == max(-S7, min(S7, a + b))


@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_float_mode_is_exact(a, b):
    assert sat_add(a, b) == a + b
    assert abs(f_minsum(a, b)) == min(abs(a), abs(b))


@pytest.mark.parametrize("y, code", [(0.0, 0), (1.0, 4), (-1.0, -4), (10.0, 15), (-10.0, -15), (0.3, 1)])
def test_quantize_examples(y, code):
    assert quantize_channel(np.array([y]), QuantSpec())[0] == code


def test_quantize_no_negative_zero():
    q = quantize_channel(np.array([-0.01]), QuantSpec())
    assert q[0] == 0 and not np.signbit(q[0])


@pytest.mark.parametrize("kw", [
    dict(q_channel=8, q_internal=7),
    dict(q_channel=1),
    dict(scale=0.0),
    dict(scale=-1.0),
])
def test_quant_spec_validation(kw):
    with pytest.raises(ValueError):
        QuantSpec(**kw)
