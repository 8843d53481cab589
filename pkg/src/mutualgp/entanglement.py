"""Relative entropy of entanglement and the classical/quantum split of the mutual phase.

``Gamma - Gamma_S`` (composite minus closest-separable phase) is the part of
the mutual phase due to entanglement; ``Gamma_S - sum gamma^M`` is the part
carried by classical correlations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect
from scipy.special import gammaln, xlogy

from .closed_form import (
    TRACE_TOL,
    s_state_gp,
    s_state_subsystem_gp,
    w_state_gp,
    w_state_subsystem_gp,
)
from .core import PRINCIPAL, UNWRAPPED, Angle, principal_arg, tracked_arg, wrap
from .errors import DegenerateSubsystem, NoConvergence, OutOfRange, ZeroMagnitude

LN2 = math.log(2.0)


def er_s_state(r):
    """E_R (bits) of the S state with Bloch length ``r`` of its marginals.

    ``1 - [(1+r) log2(1+r) + (1-r) log2(1-r)] / 2``, with ``0 log 0 = 0``.
    Accepts scalars or arrays.
    """
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > 1)):
        raise OutOfRange("r must lie in [0, 1]")
    out = 1.0 - 0.5 * (xlogy(1 + r, 1 + r) + xlogy(1 - r, 1 - r)) / LN2
    return out if out.ndim else float(out)


def log2_binomial(n, k):
    """``log2 C(n, k)`` continued to real ``k`` through log-Gamma."""
    return (gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)) / LN2


def _er_w_integer(n: int, k: int) -> float:
    # exact big-integer binomial and log1p keep the large-N cancellation benign
    if k in (0, n):
        return 0.0
    return -(math.log2(math.comb(n, k)) + (n - k) * math.log1p(-k / n) / LN2 + k * math.log2(k / n))


def er_w_state(n: int, k):
    """E_R (bits) of ``|N,k>``; ``k`` may be real (log-Gamma binomial).

    ``-log2 C(N,k) - (N-k) log2((N-k)/N) - k log2(k/N)``.
    """
    k = np.asarray(k, dtype=float)
    if np.any((k < 0) | (k > n)):
        raise OutOfRange(f"k must lie in [0, {n}]")
    out = -log2_binomial(n, k) - (xlogy(n - k, (n - k) / n) + xlogy(k, k / n)) / LN2
    # exact zeros at the separable endpoints
    out = np.where((k == 0) | (k == n), 0.0, out)
    whole = (k == np.round(k)) & (n == int(n))
    if np.any(whole):
        out = np.array(out, dtype=float)
        out[whole] = [_er_w_integer(int(n), int(x)) for x in k[whole]]
    return out if out.ndim else float(out)


def inverse_er_s(target: float, xtol: float = 1e-15, maxiter: int = 200) -> float:
    """``r`` in ``[0, 1]`` with ``er_s_state(r) == target`` (bisection).

    ``er_s_state`` decreases strictly from 1 at ``r = 0`` to 0 at ``r = 1``.
    """
    if not 0.0 <= target <= 1.0:
        raise OutOfRange(f"E_R = {target} outside [0, 1]")
    if target == 1.0:
        return 0.0
    if target == 0.0:
        return 1.0
    try:
        return float(bisect(lambda r: er_s_state(r) - target, 0.0, 1.0,
                            xtol=xtol, maxiter=maxiter))
    except RuntimeError as exc:
        raise NoConvergence(str(exc)) from exc


def closest_separable_gp_s(r: float, n: int, gamma: float, branch: str = PRINCIPAL) -> Angle:
    """Phase of ``(1+r)/2 |0..0><0..0| + (1-r)/2 |1..1><1..1|`` under the loop.

    Each diagonal term picks up ``e^{+-i N gamma}``, so
    ``tr rho_S U = (1+r)/2 e^{iN gamma} + (1-r)/2 e^{-iN gamma}``.
    """
    if not 0.0 <= r <= 1.0:
        raise OutOfRange(f"r = {r} outside [0, 1]")
    x = n * gamma
    # the two weights sum to 1 and differ by r
    z = complex(math.cos(x), r * math.sin(x))
    if abs(z) <= TRACE_TOL:
        raise ZeroMagnitude(f"closest separable trace vanishes at N*gamma={x}")
    if branch == PRINCIPAL:
        return principal_arg(z)
    return Angle(tracked_arg(r, x), UNWRAPPED)


def closest_separable_gp_w(n: int, k: float, gamma: float, branch: str = UNWRAPPED) -> Angle:
    """``N * arg(cos g + i ((N - 2k)/N) sin g)`` for the W-family separable state.

    The unwrapped value multiplies the continuous single-factor branch by
    ``N`` and is 0 at ``N = 2k``. The principal value reduces that modulo
    ``2*pi`` and is undefined at ``N = 2k``.
    """
    if not 0 <= k <= n:
        raise OutOfRange(f"k = {k} outside [0, {n}]")
    s = (n - 2 * k) / n
    if branch == UNWRAPPED:
        return Angle(n * tracked_arg(s, gamma) if s != 0 else 0.0, UNWRAPPED)
    if abs(s) < 1e-9:
        raise DegenerateSubsystem("N = 2k")
    single = principal_arg(complex(math.cos(gamma), s * math.sin(gamma)))
    return Angle(wrap(n * single.value), PRINCIPAL)


@dataclass(frozen=True)
class EntanglementReport:
    e_r: float
    gamma_s: Angle
    quantum_contribution: Angle
    classical_contribution: Angle
    composite_gp: Angle
    subsystem_sum: float

    @property
    def mutual_gp(self) -> float:
        return self.quantum_contribution.value + self.classical_contribution.value

    def to_dict(self) -> dict:
        return {
            "e_r": self.e_r,
            "gamma_s": self.gamma_s.value,
            "quantum_contribution": self.quantum_contribution.value,
            "classical_contribution": self.classical_contribution.value,
            "composite_gp": self.composite_gp.value,
            "subsystem_sum": self.subsystem_sum,
            "mutual_gp": self.mutual_gp,
        }


def attribute(family: str, params: dict, gamma: float) -> EntanglementReport:
    """Split the mutual phase into entanglement and classical parts.

    Parameters
    ----------
    family : {"S", "W"}
    params : dict
        ``{"n": N, "r": r}`` for S states, ``{"n": N, "k": k}`` for W states.
    gamma : float
        Common pure-state loop phase of every qubit.

    All phases are on the unwrapped branch anchored at ``gamma = 0``.
    """
    fam = family.upper()
    n = int(params["n"])
    if fam == "S":
        r = float(params["r"])
        big = s_state_gp(r, n, gamma, branch=UNWRAPPED)
        sub = n * s_state_subsystem_gp(r, gamma, branch=UNWRAPPED).value
        gs = closest_separable_gp_s(r, n, gamma, branch=UNWRAPPED)
        e_r = er_s_state(r)
    elif fam == "W":
        k = float(params["k"])
        big = w_state_gp(n, k, gamma, branch=UNWRAPPED)
        sub = n * w_state_subsystem_gp(n, k, gamma, branch=UNWRAPPED).value
        gs = closest_separable_gp_w(n, k, gamma, branch=UNWRAPPED)
        e_r = er_w_state(n, k)
    else:
        raise ValueError(f"unknown family {family!r}")
    return EntanglementReport(
        e_r=float(e_r),
        gamma_s=gs,
        quantum_contribution=Angle(big.value - gs.value, UNWRAPPED),
        classical_contribution=Angle(gs.value - sub, UNWRAPPED),
        composite_gp=big,
        subsystem_sum=sub,
    )
