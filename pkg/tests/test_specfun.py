import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mathieu_pendulum.specfun import (
    bessel_j,
    bessel_j_orders,
    bessel_small_x,
    bessel_wave_asymptotic,
)

# mpmath.besselj at 30 digits
J1_2 = 0.576724807756873387
J3_HALF = 0.002563729994587244
J0_50 = 0.055812327669251815
J1_50 = -0.097511828125175138


def test_origin():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(4, 0.0) == 0.0
    assert bessel_j(0, 5e-324) == 1.0
    assert bessel_j(2, 5e-324) == 0.0


@pytest.mark.parametrize("r, x, expected", [(1, 2.0, J1_2), (3, 0.5, J3_HALF), (0, 50.0, J0_50), (1, 50.0, J1_50)])
def test_against_mpmath_values(r, x, expected):
    assert bessel_j(r, x) == pytest.approx(expected, abs=1e-12)


def test_small_x_form_near_j3_at_half():
    # the leading term overshoots J_3(0.5) by about 1.6%
    approx = bessel_small_x(3, 0.5)
    assert approx == pytest.approx(0.5 ** 3 / (8 * 6))
    assert abs(approx - J3_HALF) / J3_HALF < 0.02


def test_crossover_continuity():
    for r in (0, 1, 5, 20):
        below = bessel_j(r, 12.0 - 1e-12)
        above = bessel_j(r, 12.0)
        assert below == pytest.approx(above, abs=1e-11)


@pytest.mark.parametrize("x", [0.01, 0.7, 5.0, 11.9, 12.0, 30.0, 99.5])
def test_sequence_matches_scalar(x):
    seq = bessel_j_orders(40, x)
    for r in (0, 1, 7, 25, 40):
        assert seq[r] == pytest.approx(bessel_j(r, x), abs=1e-12)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        bessel_j(0, -1.0)
    with pytest.raises(ValueError):
        bessel_j(0, float("nan"))
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_wave_asymptotic(0, 0.0)


def test_large_order():
    assert bessel_j(10_000, 50.0) == 0.0
    assert bessel_j(60, 50.0) == pytest.approx(0.00104851959953142, rel=1e-10)
    assert abs(bessel_j(100, 50.0)) < 1e-20


def test_wave_modulus():
    assert abs(bessel_wave_asymptotic(2, 100.0)) == pytest.approx(1 / math.sqrt(2 * math.pi * 100), rel=1e-14)


@pytest.mark.parametrize("r", [0, 1])
def test_wave_real_part_at_50(r):
    w = bessel_wave_asymptotic(r, 50.0)
    j = bessel_j(r, 50.0)
    assert abs(2 * w.real - j) / abs(j) <= 1e-3


def test_small_x_examples():
    assert bessel_small_x(0, 0.0) == 1.0
    assert bessel_small_x(2, 0.1) == pytest.approx(0.00125)
    assert abs(bessel_small_x(1, 0.01) - bessel_j(1, 0.01)) / bessel_j(1, 0.01) <= 1e-4


@pytest.mark.parametrize("r", range(6))
@pytest.mark.parametrize("x", [20.0, 50.0, 100.0])
def test_wave_envelope(r, x):
    assert abs(2 * bessel_wave_asymptotic(r, x).real - bessel_j(r, x)) <= 0.5 * x ** -1.5


@pytest.mark.parametrize("r", range(6))
@pytest.mark.parametrize("x", [0.001, 0.01, 0.03, 0.05])
def test_small_x_envelope(r, x):
    assert abs(bessel_small_x(r, x) - bessel_j(r, x)) <= x ** (r + 2)


@settings(max_examples=200, deadline=None)
@given(r=st.integers(1, 20), x=st.floats(0.1, 100.0))
def test_three_term_recurrence(r, x):
    lhs = bessel_j(r - 1, x) + bessel_j(r + 1, x)
    assert lhs == pytest.approx(2 * r / x * bessel_j(r, x), abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(r=st.integers(0, 50), x=st.floats(0.0, 100.0))
def test_bounded_by_one(r, x):
    assert abs(bessel_j(r, x)) <= 1.0


def test_neumann_sum_rule():
    # J_0 + 2 sum J_2k = 1 is independent of how the values were produced
    for x in (0.3, 8.0, 12.5, 70.0):
        seq = bessel_j_orders(200, x)
        assert seq[0] + 2 * np.sum(seq[2::2]) == pytest.approx(1.0, abs=1e-13)
