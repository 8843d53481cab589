import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mutualgp.core import (
    PRINCIPAL,
    UNWRAPPED,
    Angle,
    DickeSuperposition,
    LocalLoop,
    PhaseReport,
    ReducedQubit,
    eigen2,
    principal_arg,
    reduced_qubit,
    state_from_dict,
    tracked_arg,
    unwrap,
    unwrap_array,
    wrap,
)
from mutualgp.errors import DegenerateSpectrum, ZeroMagnitude

from conftest import random_amps

angles = st.floats(-50, 50, allow_nan=False)


@pytest.mark.parametrize("z, expected", [(1 + 0j, 0.0), (-1 + 0j, math.pi), (-1 - 0j, math.pi),
                                         (1j, math.pi / 2), (-1j, -math.pi / 2)])
def test_principal_arg(z, expected):
    assert principal_arg(z).value == pytest.approx(expected, abs=1e-15)
    assert principal_arg(z).mode == PRINCIPAL


def test_principal_arg_zero():
    with pytest.raises(ZeroMagnitude):
        principal_arg(0j)


@given(angles)
def test_wrap_range_and_congruence(x):
    w = wrap(x)
    assert -math.pi < w <= math.pi
    assert abs(math.remainder(w - x, 2 * math.pi)) < 1e-12


def test_wrap_pi_boundary():
    assert wrap(-math.pi) == math.pi
    assert wrap(math.pi) == math.pi
    np.testing.assert_allclose(wrap(np.array([3 * math.pi, -3 * math.pi])), [math.pi, math.pi])


def test_angle_rejects_out_of_range_principal():
    with pytest.raises(ValueError):
        Angle(4.0, PRINCIPAL)
    assert Angle(4.0, UNWRAPPED).principal().value == pytest.approx(4.0 - 2 * math.pi)


@pytest.mark.parametrize("samples, expected", [
    ([0, 3, -3], [0, 3, 2 * math.pi - 3]),
    ([0, 0.1, 0.2], [0, 0.1, 0.2]),
])
def test_unwrap_examples(samples, expected):
    out = unwrap([Angle(s) for s in samples])
    np.testing.assert_allclose([a.value for a in out], expected, atol=1e-15)
    assert all(a.mode == UNWRAPPED for a in out)


def test_unwrap_recovers_line():
    g = np.linspace(0, 0.5, 501)
    out = unwrap([Angle(wrap(51 * x)) for x in g])
    np.testing.assert_allclose([a.value for a in out], 51 * g, atol=1e-12)


@given(st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=40), st.floats(-5, 5))
def test_unwrap_identity_on_small_steps(steps, start):
    # sequences whose adjacent steps are below pi are reproduced exactly
    seq = start + np.cumsum(np.asarray(steps))
    out = unwrap_array(wrap(seq), anchor=0)
    out += seq[0] - out[0]
    np.testing.assert_allclose(out, seq, atol=1e-9)


@given(st.floats(-1, 1), st.floats(-40, 40))
def test_tracked_arg_congruent_to_principal(s, x):
    t = tracked_arg(s, x)
    z = complex(math.cos(x), s * math.sin(x))
    if abs(z) > 1e-9:
        assert abs(wrap(t - math.atan2(z.imag, z.real))) < 1e-9


@pytest.mark.parametrize("s", [1.0, 0.61, 0.05, -0.3, -1.0])
def test_tracked_arg_is_continuous(s):
    x = np.linspace(-20, 20, 200001)
    t = tracked_arg(s, x)
    assert tracked_arg(s, 0.0) == 0.0
    assert np.max(np.abs(np.diff(t))) < 0.02 / max(abs(s), 1e-2) + 1e-3
    if s == 1.0:
        np.testing.assert_allclose(t, x, atol=1e-12)


def test_dicke_superposition_validation():
    with pytest.raises(ValueError):
        DickeSuperposition(2, [1, 1, 0])
    with pytest.raises(ValueError):
        DickeSuperposition(2, [1, 0])
    with pytest.raises(ValueError):
        DickeSuperposition.from_amplitudes([1, 1, 0])
    s = DickeSuperposition.from_amplitudes(np.array([1, 1, 0]) / math.sqrt(2) * (1 + 1e-8))
    assert s.weights == pytest.approx([0.5, 0.5, 0.0], abs=1e-15)
    with pytest.raises(ValueError):
        s.amps[0] = 0


def test_state_round_trip():
    s = DickeSuperposition.from_amplitudes(np.array([1, 1j, 0.5]) / 1.5)
    assert np.allclose(state_from_dict(s.to_dict()).amps, s.amps)


def test_product_amplitudes_are_normalised():
    s = DickeSuperposition.product(6, 0.7)
    assert np.linalg.norm(s.amps) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("state, expected", [
    (DickeSuperposition.s_state(3, 0.6), (0.8, 0.2, 0.0)),
    (DickeSuperposition(3, [1, 0, 0, 0]), (1.0, 0.0, 0.0)),
    (DickeSuperposition.dicke(2, 1), (0.5, 0.5, 0.0)),
    (DickeSuperposition.dicke(3, 1), (2 / 3, 1 / 3, 0.0)),
])
def test_reduced_qubit_examples(state, expected):
    rq = reduced_qubit(state)
    assert (rq.rho00, rq.rho11) == pytest.approx(expected[:2], abs=1e-12)
    assert abs(rq.rho01 - expected[2]) < 1e-12


@given(st.integers(1, 12), st.integers(0, 2**32 - 1))
def test_reduced_qubit_invariants(n, seed):
    state = DickeSuperposition(n, random_amps(np.random.default_rng(seed), n))
    rq = reduced_qubit(state)
    k = np.arange(n + 1)
    assert rq.rho00 + rq.rho11 == pytest.approx(1.0, abs=1e-12)
    assert rq.r <= 1 + 1e-12
    assert rq.rho00 - rq.rho11 == pytest.approx(np.sum(state.weights * (n - 2 * k)) / n, abs=1e-12)


@pytest.mark.parametrize("rq, r, theta, phi", [
    (ReducedQubit(0.8, 0.2, 0), 0.6, 0.0, 0.0),
    (ReducedQubit(0.5, 0.5, 0.5), 1.0, math.pi / 2, 0.0),
    (ReducedQubit(0.2, 0.8, 0), 0.6, math.pi, 0.0),
])
def test_eigen2_examples(rq, r, theta, phi):
    rr, th, ph, _ = eigen2(rq)
    assert (rr, th, ph) == pytest.approx((r, theta, phi), abs=1e-12)


def test_eigen2_degenerate():
    with pytest.raises(DegenerateSpectrum):
        eigen2(ReducedQubit(0.5, 0.5, 0))


@given(st.floats(0, 1), st.floats(0, 1), st.floats(-math.pi, math.pi))
def test_eigen2_reconstruction(p, frac, ang):
    bound = math.sqrt(p * (1 - p))
    rq = ReducedQubit(p, 1 - p, frac * bound * complex(math.cos(ang), math.sin(ang)))
    if rq.r < 1e-6:
        return
    r, _, _, (v1, v2) = eigen2(rq)
    rebuilt = (1 + r) / 2 * np.outer(v1, v1.conj()) + (1 - r) / 2 * np.outer(v2, v2.conj())
    np.testing.assert_allclose(rebuilt, rq.matrix(), atol=1e-12)
    assert abs(np.vdot(v1, v2)) < 1e-12


def test_local_loop():
    loop = LocalLoop.uniform(3, 0.2)
    assert loop.n_sites == 3 and loop.cyclic
    with pytest.raises(ValueError):
        LocalLoop((0.1,), (0.5,), cyclic=True)
    finals = np.array([np.diag([np.exp(0.3j), np.exp(-0.3j)])])
    loop = LocalLoop.from_unitaries(finals)
    assert loop.cyclic and loop.gammas[0] == pytest.approx(0.3)


def test_phase_report_checks_invariant():
    a = Angle(0.3, UNWRAPPED)
    sub = (Angle(0.1, UNWRAPPED),) * 2
    rep = PhaseReport(a, sub, Angle(0.1, UNWRAPPED))
    assert rep.to_dict()["mutual_gp"] == pytest.approx(0.1)
    with pytest.raises(ValueError):
        PhaseReport(a, sub, Angle(0.2, UNWRAPPED))
    with pytest.raises(ValueError):
        PhaseReport(a, (Angle(0.1),) * 2, Angle(0.1, UNWRAPPED))


@pytest.mark.parametrize("x", [11 * math.pi, -11 * math.pi, 51 * math.pi, -3 * math.pi])
def test_wrap_stays_in_range_at_odd_multiples(x):
    w = wrap(np.array([x]))[0]
    assert -math.pi < w <= math.pi
    assert abs(abs(w) - math.pi) < 1e-13
