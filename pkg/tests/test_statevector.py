import math

import numpy as np
import pytest
from scipy.stats import unitary_group

from mutualgp.core import DickeSuperposition, reduced_qubit
from mutualgp.errors import IndexOutOfRange, TooLarge
from mutualgp.sim import (
    StateVector,
    apply_local,
    dicke_state,
    partial_trace_single,
    random_state,
    superpose,
)

from conftest import random_amps


def basis(n, *strings):
    v = np.zeros(1 << n, dtype=complex)
    for s in strings:
        v[int(s, 2)] = 1
    return v / np.linalg.norm(v)


def test_dicke_examples():
    np.testing.assert_allclose(dicke_state(2, 1).amplitudes, basis(2, "01", "10"))
    np.testing.assert_allclose(dicke_state(3, 0).amplitudes, basis(3, "000"))


def test_dicke_orthonormal():
    vs = np.array([dicke_state(5, k).amplitudes for k in range(6)])
    np.testing.assert_allclose(vs.conj() @ vs.T, np.eye(6), atol=1e-14)


def test_size_cap():
    with pytest.raises(TooLarge):
        dicke_state(15, 3)
    assert dicke_state(15, 1, max_qubits=15).n_qubits == 15


def test_statevector_validation():
    with pytest.raises(ValueError):
        StateVector(2, [1, 1, 0, 0])
    with pytest.raises(ValueError):
        StateVector(2, [1, 0])


def test_superpose_examples():
    ghz = DickeSuperposition(3, np.array([1, 0, 0, 1]) / math.sqrt(2))
    np.testing.assert_allclose(superpose(ghz).amplitudes, basis(3, "000", "111"), atol=1e-15)
    np.testing.assert_allclose(superpose(DickeSuperposition.dicke(3, 1)).amplitudes,
                               dicke_state(3, 1).amplitudes, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 6, 9])
def test_partial_trace_matches_closed_form(n, rng):
    state = DickeSuperposition(n, random_amps(rng, n))
    rq = reduced_qubit(state)
    psi = superpose(state)
    for site in range(n):
        np.testing.assert_allclose(partial_trace_single(psi, site).matrix(), rq.matrix(), atol=1e-12)


def test_partial_trace_examples():
    ghz = superpose(DickeSuperposition.s_state(3, 0.6))
    np.testing.assert_allclose(partial_trace_single(ghz, 0).matrix(), np.diag([0.8, 0.2]), atol=1e-15)
    plus = StateVector(3, np.full(8, 1 / math.sqrt(8)))
    assert partial_trace_single(plus, 1).rho01 == pytest.approx(0.5, abs=1e-15)
    w = partial_trace_single(dicke_state(3, 1), 2).matrix()
    np.testing.assert_allclose(w, np.diag([2 / 3, 1 / 3]), atol=1e-15)
    with pytest.raises(IndexOutOfRange):
        partial_trace_single(plus, 3)


def test_partial_trace_site_order():
    # |0> (x) |1>: site 0 is the leftmost factor
    psi = StateVector(2, basis(2, "01"))
    assert partial_trace_single(psi, 0).rho00 == 1.0
    assert partial_trace_single(psi, 1).rho11 == 1.0


def test_apply_local_matches_kron_and_keeps_norm(rng):
    n = 5
    psi = random_state(n, rng)
    ops = [unitary_group.rvs(2, random_state=int(rng.integers(1 << 31))) for _ in range(n)]
    big = ops[0]
    for op in ops[1:]:
        big = np.kron(big, op)
    out = apply_local(psi, ops)
    np.testing.assert_allclose(out, big @ psi.amplitudes, atol=1e-13)
    assert abs(np.linalg.norm(out) - 1) < 1e-10
