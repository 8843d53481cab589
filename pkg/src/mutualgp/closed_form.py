"""Closed-form geometric phases of symmetric superpositions under cyclic local loops.

For ``|Psi> = sum_k a_k |N,k>`` and local unitaries with
``<0|U_n(T)|0> = e^{i gamma_n}``, ``<1|U_n(T)|1> = e^{-i gamma_n}`` the
composite phase is the argument of

    sum_k |a_k|^2 / C(N,k) * sum_m exp(i sum_n A^k_mn gamma_n)

where the rows of ``A^k`` run over all sign vectors with ``N-k`` entries
``+1`` and ``k`` entries ``-1``. The inner sum factorises as
``exp(i sum gamma) * e_k(exp(-2i gamma_1), ..., exp(-2i gamma_N))`` with
``e_k`` the elementary symmetric polynomial; that route is the default and
the literal enumeration is kept as an independent reference.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.special import comb

from .core import (
    PRINCIPAL,
    UNWRAPPED,
    Angle,
    DEGENERACY_TOL,
    DickeSuperposition,
    LocalLoop,
    PhaseReport,
    principal_arg,
    reduced_qubit,
    tracked_arg,
    unwrap_array,
    wrap,
)
from .errors import (
    DegenerateSubsystem,
    IndexOutOfRange,
    NonCyclicLoop,
    OutOfRange,
    TooLarge,
    ZeroMagnitude,
)

#: ``|tr rho U|`` below this is treated as a phase jump.
TRACE_TOL = 1e-12
ENUMERATION_CAP = 10**7
MAX_ENUMERATION_QUBITS = 20


def _check_branch(branch):
    if branch not in (PRINCIPAL, UNWRAPPED):
        raise ValueError(f"unknown branch mode {branch!r}")


def _angle(value, branch) -> Angle:
    return Angle(wrap(value), PRINCIPAL) if branch == PRINCIPAL else Angle(value, UNWRAPPED)


@dataclass(frozen=True)
class SignPattern:
    """The ``C(N,k) x N`` sign matrix ``A^k``.

    Rows are the distinct permutations of ``(+1,)*(N-k) + (-1,)*k`` in
    lexicographic order of the corresponding bit strings (``+1 -> 0``,
    ``-1 -> 1``), so the first row is the unpermuted one.
    """

    n_qubits: int
    k: int

    def __post_init__(self):
        if not 0 <= self.k <= self.n_qubits:
            raise IndexOutOfRange(f"k={self.k} outside [0, {self.n_qubits}]")

    def __len__(self):
        return math.comb(self.n_qubits, self.k)

    def rows(self) -> Iterator[tuple]:
        n = self.n_qubits
        for plus in itertools.combinations(range(n), n - self.k):
            row = [-1] * n
            for p in plus:
                row[p] = 1
            yield tuple(row)

    def matrix(self) -> np.ndarray:
        return np.array(list(self.rows()), dtype=np.int8).reshape(len(self), self.n_qubits)


def esp_all(values: Sequence[complex], kmax: int | None = None) -> np.ndarray:
    """``[e_0, ..., e_kmax]`` of ``values`` by the product recurrence.

    Multiplies out ``prod_n (1 + x_n t)`` one factor at a time, keeping
    coefficients up to ``t^kmax``; ``O(N * kmax)`` operations.
    """
    values = np.asarray(values, dtype=complex).reshape(-1)
    kmax = values.size if kmax is None else kmax
    e = np.zeros(kmax + 1, dtype=complex)
    e[0] = 1.0
    for x in values:
        e[1:] = e[1:] + x * e[:-1]
    return e


def esp_eval(values: Sequence[complex], k: int) -> complex:
    """Elementary symmetric polynomial ``e_k(values)``; ``e_0 = 1``."""
    values = np.asarray(values, dtype=complex).reshape(-1)
    if not 0 <= k <= values.size:
        raise IndexOutOfRange(f"k={k} outside [0, {values.size}]")
    return complex(esp_all(values, k)[k])


def multiset_perm_sum(gammas: Sequence[float], k: int, cap: int = ENUMERATION_CAP) -> complex:
    """``sum_m exp(i sum_n A^k_mn gamma_n)`` by walking every row of ``A^k``."""
    gammas = np.asarray(gammas, dtype=float).reshape(-1)
    n = gammas.size
    if not 0 <= k <= n:
        raise IndexOutOfRange(f"k={k} outside [0, {n}]")
    if n > MAX_ENUMERATION_QUBITS or math.comb(n, k) > cap:
        raise TooLarge(f"C({n},{k}) rows exceed the enumeration cap")
    rows = SignPattern(n, k).rows()
    total = 0j
    while True:
        block = np.array(list(itertools.islice(rows, 1 << 16)), dtype=float)
        if block.size == 0:
            return complex(total)
        total += np.exp(1j * (block @ gammas)).sum()


def composite_trace(state: DickeSuperposition, gammas: Sequence[float], method: str = "esp") -> complex:
    """``tr rho U(T)`` for a cyclic loop with per-site phases ``gammas``."""
    gammas = np.asarray(gammas, dtype=float).reshape(-1)
    n = state.n_qubits
    if gammas.size != n:
        raise ValueError(f"{gammas.size} phases for {n} qubits")
    w = state.weights
    if method == "esp":
        e = esp_all(np.exp(-2j * gammas))
        ks = np.arange(n + 1)
        return complex(np.exp(1j * gammas.sum()) * np.sum(w / comb(n, ks) * e))
    if method == "enumerate":
        return complex(sum(w[k] / math.comb(n, k) * multiset_perm_sum(gammas, k)
                           for k in range(n + 1) if w[k] > 0))
    raise ValueError(f"unknown method {method!r}")


def _ray_samples(gammas) -> int:
    return 65 + int(40 * np.sum(np.abs(gammas)))


def composite_gp(state: DickeSuperposition, loop: LocalLoop, method: str = "esp",
                 branch: str = PRINCIPAL) -> Angle:
    """Composite geometric phase ``arg tr rho U(T)`` of a symmetric superposition.

    Parameters
    ----------
    state : DickeSuperposition
    loop : LocalLoop
        Must be cyclic.
    method : {"esp", "enumerate"}
        Symmetric-polynomial reduction or literal sum over sign rows.
    branch : {"principal", "unwrapped"}
        The unwrapped value is tracked along ``t * gammas`` for ``t`` in
        ``[0, 1]`` starting from 0 at the identity loop.

    Raises
    ------
    NonCyclicLoop, ZeroMagnitude
    """
    _check_branch(branch)
    if not loop.cyclic:
        raise NonCyclicLoop("closed form needs each local unitary to return |0>, |1> to their rays")
    gammas = np.asarray(loop.gammas)
    z = composite_trace(state, gammas, method)
    if abs(z) <= TRACE_TOL:
        raise ZeroMagnitude(f"|tr rho U| = {abs(z):.3g} at a phase jump")
    p = principal_arg(z)
    if branch == PRINCIPAL:
        return p
    ts = np.linspace(0.0, 1.0, _ray_samples(gammas))
    path = np.array([composite_trace(state, t * gammas, method) for t in ts])
    track = unwrap_array(np.angle(path), anchor=0)
    return Angle(p.value + 2 * math.pi * round((track[-1] - p.value) / (2 * math.pi)), UNWRAPPED)


def _population_imbalance(state: DickeSuperposition) -> float:
    n = state.n_qubits
    k = np.arange(n + 1)
    return float(np.sum(state.weights * (n - 2 * k)) / n)


def subsystem_gp_weighted(state: DickeSuperposition, gamma: float) -> Angle:
    """``arg(rho00 e^{i gamma} + rho11 e^{-i gamma})``."""
    rq = reduced_qubit(state)
    return principal_arg(rq.rho00 * np.exp(1j * gamma) + rq.rho11 * np.exp(-1j * gamma))


def subsystem_gp(state: DickeSuperposition, gamma: float, branch: str = PRINCIPAL) -> Angle:
    """Mixed-state phase of one site: ``arg(cos g + i r cos(theta) sin g)``.

    ``r cos(theta) = sum_k |a_k|^2 (N - 2k)/N``. The frequency-weighted form
    :func:`subsystem_gp_weighted` is evaluated as well and must agree.

    Raises
    ------
    DegenerateSubsystem
        If the reduced state has ``r < 1e-9``.
    """
    _check_branch(branch)
    rq = reduced_qubit(state)
    if rq.r < DEGENERACY_TOL:
        raise DegenerateSubsystem(f"reduced state degenerate (r = {rq.r:.3g})")
    s = _population_imbalance(state)
    p = principal_arg(complex(math.cos(gamma), s * math.sin(gamma)))
    other = subsystem_gp_weighted(state, gamma)
    if abs(wrap(p.value - other.value)) > 1e-12:
        raise ArithmeticError("imbalance and weighted forms of the subsystem phase disagree")
    if branch == PRINCIPAL:
        return p
    return Angle(tracked_arg(s, gamma), UNWRAPPED)


def s_state_gp(r: float, n: int, gamma: float, branch: str = PRINCIPAL) -> Angle:
    """Composite phase of ``sqrt((1+r)/2)|0..0> + sqrt((1-r)/2)|1..1>``.

    The unwrapped branch is continuous in ``gamma`` for ``r > 0``; at
    ``r = 0`` it degenerates to the principal value (0 or pi).
    """
    _check_branch(branch)
    if not 0.0 <= r <= 1.0:
        raise OutOfRange(f"r = {r} outside [0, 1]")
    x = n * gamma
    z = (1 + r) / 2 * np.exp(1j * x) + (1 - r) / 2 * np.exp(-1j * x)
    if abs(z) <= TRACE_TOL:
        raise ZeroMagnitude(f"S-state trace vanishes at r={r}, N*gamma={x}")
    if branch == PRINCIPAL:
        return principal_arg(z)
    return Angle(tracked_arg(r, x), UNWRAPPED)


def s_state_subsystem_gp(r: float, gamma: float, branch: str = PRINCIPAL) -> Angle:
    _check_branch(branch)
    if r < DEGENERACY_TOL:
        raise DegenerateSubsystem("S-state subsystem is maximally mixed")
    if branch == PRINCIPAL:
        return principal_arg(complex(math.cos(gamma), r * math.sin(gamma)))
    return Angle(tracked_arg(r, gamma), UNWRAPPED)


def w_state_gp(n: int, k: float, gamma: float, branch: str = UNWRAPPED) -> Angle:
    """``(N - 2k) * gamma`` for the Dicke state ``|N,k>``."""
    _check_branch(branch)
    if not 0 <= k <= n:
        raise OutOfRange(f"k = {k} outside [0, {n}]")
    return _angle((n - 2 * k) * gamma, branch)


def w_state_subsystem_gp(n: int, k: float, gamma: float, branch: str = PRINCIPAL) -> Angle:
    """``arg(cos g + i ((N - 2k)/N) sin g)``; undefined when ``N = 2k``."""
    _check_branch(branch)
    if not 0 <= k <= n:
        raise OutOfRange(f"k = {k} outside [0, {n}]")
    s = (n - 2 * k) / n
    if abs(s) < DEGENERACY_TOL:
        raise DegenerateSubsystem("N = 2k: subsystem maximally mixed")
    if branch == PRINCIPAL:
        return principal_arg(complex(math.cos(gamma), s * math.sin(gamma)))
    return Angle(tracked_arg(s, gamma), UNWRAPPED)


def mutual_gp(state: DickeSuperposition, loop: LocalLoop, branch: str = UNWRAPPED,
              method: str = "esp") -> PhaseReport:
    """Composite, per-site and mutual phases ``Gamma - sum_n gamma_n^M``.

    The loop is assumed parallel transported, so both dynamical entries of
    the report are zero.
    """
    _check_branch(branch)
    if loop.n_sites != state.n_qubits:
        raise ValueError("loop and state disagree on the number of qubits")
    big = composite_gp(state, loop, method=method, branch=branch)
    subs = tuple(subsystem_gp(state, g, branch=branch) for g in loop.gammas)
    delta = big.value - sum(a.value for a in subs)
    return PhaseReport(
        composite_gp=big,
        subsystem_gps=subs,
        mutual_gp=_angle(delta, branch),
        dynamical_composite=0.0,
        dynamical_subsystems=(0.0,) * state.n_qubits,
    )
