"""Randomised cross-checks between the closed forms and the statevector oracle.

Each mode yields one record per case (inputs, formula value, oracle value,
absolute error); :func:`run` adds a summary line and an exit status.
"""
from __future__ import annotations

import json
import math
from typing import Callable, Iterator

import numpy as np

from .closed_form import composite_gp, esp_eval, multiset_perm_sum
from .core import DickeSuperposition, LocalLoop, angular_distance, reduced_qubit
from .sim import (
    MAX_QUBITS,
    dynamical_phase,
    enforce_pt,
    pt_loop_phase,
    pt_path_z,
    pt_report,
    random_local_path,
    random_state,
    superpose,
    total_phase,
)

DEFAULT_TOL = {"cyclic": 1e-6, "generic": 1e-8, "additivity": 1e-8, "esp": 1e-10}
DEFAULT_CASES = {"cyclic": 50, "generic": 20, "additivity": 100, "esp": 100}
MODES = tuple(DEFAULT_TOL)


def random_diagonal_superposition(n: int, rng: np.random.Generator) -> DickeSuperposition:
    """Random Dicke superposition with no two adjacent ``a_k`` nonzero (so ``rho01 = 0``)."""
    while True:
        support = []
        k = 0
        while k <= n:
            if rng.random() < 0.5:
                support.append(k)
                k += 2
            else:
                k += 1
        if support:
            break
    a = np.zeros(n + 1, dtype=complex)
    a[support] = rng.normal(size=len(support)) + 1j * rng.normal(size=len(support))
    return DickeSuperposition.from_amplitudes(a / np.linalg.norm(a))


def random_superposition(n: int, rng: np.random.Generator) -> DickeSuperposition:
    a = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return DickeSuperposition.from_amplitudes(a / np.linalg.norm(a))


def _amps(state: DickeSuperposition) -> list:
    return [[float(z.real), float(z.imag)] for z in state.amps]


def cyclic_cases(n: int, rng, steps: int, cases: int) -> Iterator[dict]:
    """Closed-form composite phase against the propagated tilted-precession loop."""
    for _ in range(cases):
        state = random_diagonal_superposition(n, rng)
        alphas = rng.uniform(0.0, math.pi, size=n)
        formula = composite_gp(state, LocalLoop.from_phases(pt_loop_phase(alphas))).value
        oracle = total_phase(superpose(state), pt_path_z(n, alphas, n_steps=steps).final()).value
        yield {"inputs": {"amps": _amps(state), "alphas": alphas.tolist()},
               "formula": formula, "oracle": oracle, "error": float(angular_distance(formula, oracle))}


def generic_cases(n: int, rng, steps: int, cases: int) -> Iterator[dict]:
    """Random paths made parallel transporting for a tilted eigenbasis carry no dynamical phase."""
    for _ in range(cases):
        state = random_superposition(n, rng)
        rq = reduced_qubit(state)
        if rq.degenerate:
            continue
        eig = [rq.eigenvectors] * n
        path = enforce_pt(random_local_path(n, rng, n_steps=steps), eig)
        delta, per_site = dynamical_phase(superpose(state), path)
        rep = pt_report(path, eig)
        err = max(abs(delta), max(abs(d) for d in per_site), rep.max_violation)
        yield {"inputs": {"amps": _amps(state)}, "formula": 0.0, "oracle": delta,
               "per_site": per_site, "max_violation": rep.max_violation, "error": err}


def additivity_cases(n: int, rng, steps: int, cases: int) -> Iterator[dict]:
    """Composite dynamical phase against the sum of subsystem ones."""
    for _ in range(cases):
        psi = random_state(n, rng)
        delta, per_site = dynamical_phase(psi, random_local_path(n, rng, n_steps=steps))
        total = math.fsum(per_site)
        yield {"inputs": {"n": n}, "formula": total, "oracle": delta, "error": abs(delta - total)}


def esp_cases(n: int, rng, steps: int, cases: int) -> Iterator[dict]:
    """Symmetric-polynomial evaluation against the literal sign-pattern sum, every k."""
    for _ in range(cases):
        gammas = rng.uniform(-math.pi, math.pi, size=n)
        x = np.exp(-2j * gammas)
        for k in range(n + 1):
            fast = esp_eval(x, k) * np.exp(1j * gammas.sum())
            slow = multiset_perm_sum(gammas, k)
            yield {"inputs": {"gammas": gammas.tolist(), "k": k},
                   "formula": [fast.real, fast.imag], "oracle": [slow.real, slow.imag],
                   "error": float(abs(fast - slow))}


_SUITES: dict[str, Callable] = {
    "cyclic": cyclic_cases,
    "generic": generic_cases,
    "additivity": additivity_cases,
    "esp": esp_cases,
}


def run(mode: str, n: int, seed: int = 0, steps: int = 20_000, tol: float | None = None,
        cases: int | None = None, stream=None, max_qubits: int = MAX_QUBITS) -> int:
    """Run one suite, write JSON lines plus ``PASS n=..``/``FAIL n=..``; return the exit code.

    Returns 0 if every error is within ``tol``, 1 otherwise and 2 for an
    invalid configuration.
    """
    if mode not in _SUITES:
        raise ValueError(f"unknown mode {mode!r}; choose from {MODES}")
    if n < 1 or (mode != "esp" and n > max_qubits):
        raise ValueError(f"n={n} outside [1, {max_qubits}]")
    if mode in ("generic", "additivity") and steps % 2:
        raise ValueError("steps must be even for the dynamical-phase check")
    tol = DEFAULT_TOL[mode] if tol is None else tol
    cases = DEFAULT_CASES[mode] if cases is None else cases
    rng = np.random.default_rng(seed)
    count = 0
    bad = 0
    for rec in _SUITES[mode](n, rng, steps, cases):
        rec = {"mode": mode, "case": count, **rec, "ok": rec["error"] <= tol}
        count += 1
        bad += not rec["ok"]
        if stream is not None:
            stream.write(json.dumps(rec) + "\n")
    if stream is not None:
        stream.write(f"FAIL n={bad}\n" if bad else f"PASS n={count}\n")
    return 1 if bad else 0
