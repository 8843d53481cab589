"""Dynamical, total and subsystem phases extracted from sampled paths.

All time derivatives are taken through overlaps ``<Psi_j|Psi_{j+l}>`` of
sampled states, so the composite unitary is never formed.
"""
from __future__ import annotations

import numpy as np

from ..core import Angle, principal_arg
from ..errors import DegenerateSubsystem, GridTooCoarse, ZeroMagnitude
from . import _kernels
from .paths import UnitaryPath
from .statevector import StateVector, apply_local, partial_trace_single

RICHARDSON_TOL = 1e-6
OVERLAP_TOL = 1e-10
LAGS = (1, 2, 4)


def _rate(l1: np.ndarray, l2: np.ndarray, h: float) -> np.ndarray:
    """``Im <Psi_j|dPsi_j/dt>`` from lag-1 and lag-2 overlaps.

    Fourth-order central differences in the interior, second-order central
    next to the ends and second-order one-sided at the ends. Arrays carry
    any leading batch axes; time is the last axis.
    """
    a1, a2 = l1.imag, l2.imag
    m = l1.shape[-1]
    f = np.empty(l1.shape[:-1] + (m + 1,))
    f[..., 2:m - 1] = (-a2[..., :m - 3] + 8 * a1[..., 1:m - 2] + 8 * a1[..., 2:m - 1] - a2[..., 2:m - 1]) / (12 * h)
    f[..., 1] = (a1[..., 1] + a1[..., 0]) / (2 * h)
    f[..., m - 1] = (a1[..., m - 1] + a1[..., m - 2]) / (2 * h)
    f[..., 0] = (4 * a1[..., 0] - a2[..., 0]) / (2 * h)
    f[..., m] = (4 * a1[..., m - 1] - a2[..., m - 2]) / (2 * h)
    return f


def _integrate(l1, l2, h) -> np.ndarray:
    f = _rate(l1, l2, h)
    return h * (f[..., 1:-1].sum(axis=-1) + 0.5 * (f[..., 0] + f[..., -1]))


def _integrate_checked(l1, l2, l4, h, tol, what):
    """Trapezoid integral plus the same rule at half resolution as a consistency check."""
    full = _integrate(l1, l2, h)
    half = _integrate(l2[..., 0::2], l4[..., 0::2], 2 * h)
    err = float(np.max(np.abs(full - half)))
    if err > tol:
        raise GridTooCoarse(f"{what}: full and half resolution differ by {err:.3e} > {tol:.1e}")
    return full


def _composite_overlaps(psi0: StateVector, samples: np.ndarray, lags=LAGS):
    """``<Psi_j|Psi_{j+l}>`` for each lag, with ``Psi_j = (x)_n U_n(t_j) |Psi_0>``."""
    raw = _kernels.composite_overlaps(psi0.amplitudes, samples, lags)
    m = samples.shape[1]
    return {l: raw[i, :m - l] for i, l in enumerate(lags)}


def _site_overlaps(rhos: np.ndarray, samples: np.ndarray, lags=LAGS):
    """``tr[rho_n U_n(t_j)^dag U_n(t_{j+l})]`` for each site and lag."""
    raw = _kernels.site_overlaps(rhos, samples, lags)
    m = samples.shape[1]
    return {l: raw[:, i, :m - l] for i, l in enumerate(lags)}


def dynamical_phase(psi0: StateVector, path: UnitaryPath, tol: float = RICHARDSON_TOL):
    """Composite and per-site dynamical phases along a sampled local path.

    ``Delta = -i int tr[rho U^dag dU/dt] dt`` for the composite pure state and
    ``delta_n = -i int tr[rho_n U_n^dag dU_n/dt] dt`` for each reduced state,
    both by the same finite-difference and trapezoid rule so that their
    relation is measured rather than assumed.

    Parameters
    ----------
    psi0 : StateVector
    path : UnitaryPath
        Must have an even number of steps (used by the half-resolution check).
    tol : float
        Allowed disagreement between full and half resolution.

    Returns
    -------
    delta : float
    per_site : list of float

    Raises
    ------
    GridTooCoarse
    """
    if path.n_sites != psi0.n_qubits:
        raise ValueError(f"path has {path.n_sites} sites, state has {psi0.n_qubits} qubits")
    if path.n_steps % 2 or path.n_steps < 8:
        raise ValueError("dynamical_phase needs an even n_steps >= 8")
    u = path.samples
    h = path.dt
    ov = _composite_overlaps(psi0, u)
    delta = _integrate_checked(ov[1], ov[2], ov[4], h, tol, "composite")
    rhos = np.stack([partial_trace_single(psi0, n).matrix() for n in range(psi0.n_qubits)])
    so = _site_overlaps(rhos, u)
    per_site = _integrate_checked(so[1], so[2], so[4], h, tol, "subsystems")
    return float(delta), [float(x) for x in per_site]


def _finals(path_or_finals) -> np.ndarray:
    if isinstance(path_or_finals, UnitaryPath):
        return path_or_finals.final()
    return np.asarray(path_or_finals, dtype=complex)


def total_phase(psi0: StateVector, path_or_finals) -> Angle:
    """``arg <Psi(0)| (x)_n U_n(T) |Psi(0)>`` applying the 2x2 factors site by site.

    Raises
    ------
    ZeroMagnitude
        If the overlap modulus is below 1e-10.
    """
    finals = _finals(path_or_finals)
    z = complex(np.vdot(psi0.amplitudes, apply_local(psi0, finals)))
    if abs(z) < OVERLAP_TOL:
        raise ZeroMagnitude(f"|<Psi(0)|Psi(T)>| = {abs(z):.3e}")
    return principal_arg(z)


def subsystem_gp_oracle(psi0: StateVector, path_or_finals, site: int) -> Angle:
    """``arg tr[rho_n U_n(T)]`` for a site whose reduced state is non-degenerate.

    Raises
    ------
    DegenerateSubsystem
    """
    rq = partial_trace_single(psi0, site)
    if rq.degenerate:
        raise DegenerateSubsystem(f"site {site} reduced state is maximally mixed (r={rq.r:.3e})")
    u = _finals(path_or_finals)[site]
    z = complex(np.trace(rq.matrix() @ u))
    if abs(z) < OVERLAP_TOL:
        raise ZeroMagnitude(f"|tr rho_n U_n(T)| = {abs(z):.3e}")
    return principal_arg(z)
