import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mutualgp.closed_form import s_state_gp, w_state_subsystem_gp
from mutualgp.core import PRINCIPAL, UNWRAPPED, wrap
from mutualgp.entanglement import (
    attribute,
    closest_separable_gp_s,
    closest_separable_gp_w,
    er_s_state,
    er_w_state,
    inverse_er_s,
    log2_binomial,
)
from mutualgp.errors import DegenerateSubsystem, OutOfRange, ZeroMagnitude

# 50-digit mpmath references
ER_S_HALF = 0.81127812445913286391
ER_W_3_1 = 1.1699250014423123629
SEP_S_03_5_02 = 0.43708334517909455230
SEP_W_51_10_04 = 12.828969676439637487


@pytest.mark.parametrize("r, expected", [(0.0, 1.0), (1.0, 0.0), (0.5, ER_S_HALF)])
def test_er_s_values(r, expected):
    assert er_s_state(r) == pytest.approx(expected, abs=1e-14)


def test_er_s_is_binary_entropy():
    r = np.linspace(0.001, 0.999, 101)
    p = (1 + r) / 2
    h2 = -(p * np.log2(p) + (1 - p) * np.log2(1 - p))
    np.testing.assert_allclose(er_s_state(r), h2, atol=1e-14)


def test_er_s_strictly_decreasing():
    e = er_s_state(np.linspace(0, 1, 2001))
    assert np.all(np.diff(e) < 0)
    with pytest.raises(OutOfRange):
        er_s_state(1.2)


@pytest.mark.parametrize("n, k, expected", [(2, 1, 1.0), (3, 1, ER_W_3_1), (7, 0, 0.0), (7, 7, 0.0)])
def test_er_w_values(n, k, expected):
    assert er_w_state(n, k) == pytest.approx(expected, abs=1e-13)


def test_er_w_symmetry_and_maximum():
    for n in (4, 10, 51):
        k = np.arange(n + 1)
        e = er_w_state(n, k)
        np.testing.assert_allclose(e, e[::-1], atol=1e-12)
        if n % 2 == 0:
            half = n // 2
            assert e.argmax() == half
            assert e[half] == pytest.approx(n - math.log2(math.comb(n, half)), abs=1e-10)


def test_log2_binomial_integer_values():
    for n in (5, 20):
        for k in range(n + 1):
            assert log2_binomial(n, k) == pytest.approx(math.log2(math.comb(n, k)), abs=1e-11)


@pytest.mark.parametrize("n", [2, 3, 10, 100, 10**4])
def test_er_w_single_excitation(n):
    assert er_w_state(n, 1) == pytest.approx((n - 1) * math.log2(n / (n - 1)), rel=1e-12)


def test_er_w_single_excitation_below_log2e():
    vals = [er_w_state(n, 1) for n in (2, 3, 10, 100, 1000, 10**4)]
    assert np.all(np.diff(vals) > 0)
    assert vals[-1] < math.log2(math.e)


@pytest.mark.parametrize("target, expected", [(1.0, 0.0), (0.0, 1.0), (ER_S_HALF, 0.5)])
def test_inverse_er_s(target, expected):
    assert inverse_er_s(target) == pytest.approx(expected, abs=1e-12)


def test_inverse_round_trip():
    x = np.linspace(0, 1, 1001)
    back = np.array([er_s_state(inverse_er_s(t)) for t in x])
    np.testing.assert_allclose(back, x, atol=1e-10)
    with pytest.raises(OutOfRange):
        inverse_er_s(1.5)


def test_closest_separable_s_examples():
    assert closest_separable_gp_s(0.3, 5, 0.2).value == pytest.approx(SEP_S_03_5_02, abs=1e-14)
    assert closest_separable_gp_s(1.0, 4, 0.3, UNWRAPPED).value == pytest.approx(1.2, abs=1e-14)
    with pytest.raises(ZeroMagnitude):
        closest_separable_gp_s(0.0, 2, math.pi / 4)


@given(st.floats(0, 1), st.integers(1, 60), st.floats(-3.2, 3.2))
def test_closest_separable_s_equals_composite(r, n, gamma):
    for branch in (PRINCIPAL, UNWRAPPED):
        try:
            a = s_state_gp(r, n, gamma, branch).value
        except ZeroMagnitude:
            return
        assert closest_separable_gp_s(r, n, gamma, branch).value == pytest.approx(a, abs=1e-12)


def test_closest_separable_w_example():
    val = closest_separable_gp_w(51, 10, 0.4).value
    assert val == pytest.approx(SEP_W_51_10_04, abs=1e-12)
    # product of marginals: arg of (rho00 e^{ig} + rho11 e^{-ig})^N
    z = (41 / 51) * np.exp(0.4j) + (10 / 51) * np.exp(-0.4j)
    assert val == pytest.approx(51 * np.angle(z), abs=1e-12)
    assert closest_separable_gp_w(6, 0, 0.7).value == pytest.approx(4.2, abs=1e-14)
    assert closest_separable_gp_w(6, 3, 0.7).value == 0.0
    with pytest.raises(DegenerateSubsystem):
        closest_separable_gp_w(6, 3, 0.7, PRINCIPAL)


@given(st.integers(1, 60), st.floats(0, 1), st.floats(-3.1, 3.1))
def test_closest_separable_w_is_sum_of_marginals(n, frac, gamma):
    k = frac * n
    if abs(n - 2 * k) < 1e-6:
        return
    single = w_state_subsystem_gp(n, k, gamma, UNWRAPPED).value
    assert closest_separable_gp_w(n, k, gamma).value == pytest.approx(n * single, abs=1e-10)
    p = closest_separable_gp_w(n, k, gamma, PRINCIPAL).value
    assert abs(wrap(p - n * single)) < 1e-9


def test_attribute_examples():
    rep = attribute("S", {"n": 7, "r": 0.4}, 0.3)
    assert abs(rep.quantum_contribution.value) < 1e-12
    rep = attribute("W", {"n": 7, "k": 2}, 0.3)
    assert abs(rep.classical_contribution.value) < 1e-12
    assert rep.mutual_gp == pytest.approx(rep.quantum_contribution.value, abs=1e-12)
    rep = attribute("s", {"n": 5, "r": 1.0}, 2.2)
    assert abs(rep.mutual_gp) < 1e-12
    assert abs(rep.quantum_contribution.value) < 1e-12
    assert abs(rep.classical_contribution.value) < 1e-12
    with pytest.raises(ValueError):
        attribute("X", {"n": 2}, 0.1)


def test_attribute_report_dict():
    d = attribute("W", {"n": 3, "k": 1}, 0.3).to_dict()
    assert d["e_r"] == pytest.approx(ER_W_3_1, abs=1e-14)
    assert d["mutual_gp"] == pytest.approx(-0.0082468923500633337733, abs=1e-14)
