"""Sampled local unitary paths, their construction and parallel-transport diagnostics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from ..core import ReducedQubit
from ..errors import PreconditionViolated
from . import _kernels

PAULI = np.array([
    [[1, 0], [0, 1]],
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

DEFAULT_STEPS = 20_000
MIN_PT_STEPS = 1000


@dataclass(frozen=True)
class HarmonicDrive:
    """Per-site Hamiltonians ``sum_a [b_a + p_a cos(nu t) + q_a sin(nu t)] sigma_a``.

    ``coef`` has shape ``(N, 4, 3)`` (Pauli index I, X, Y, Z; then b, p, q),
    ``freq`` has shape ``(N,)``.
    """

    coef: np.ndarray
    freq: np.ndarray

    def __post_init__(self):
        coef = np.array(self.coef, dtype=float)
        freq = np.array(self.freq, dtype=float).reshape(-1)
        if coef.ndim != 3 or coef.shape[1:] != (4, 3) or coef.shape[0] != freq.size:
            raise ValueError("coef must be (N, 4, 3) with one frequency per site")
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "freq", freq)

    def hamiltonian(self, t: float) -> np.ndarray:
        """``(N, 2, 2)`` Hamiltonians at time ``t``."""
        basis = np.stack([np.ones_like(self.freq), np.cos(self.freq * t), np.sin(self.freq * t)], -1)
        comps = np.einsum("nac,nc->na", self.coef, basis)
        return np.einsum("na,aij->nij", comps, PAULI)


class UnitaryPath:
    """Local unitaries ``U_n(t_j)`` on the grid ``t_j = j T / n_steps``.

    Built either from a :class:`HarmonicDrive` (integrated on demand; the end
    point can be obtained without storing samples) or from explicit samples.
    ``U_n(0)`` is exactly the identity.
    """

    def __init__(self, duration: float, n_steps: int, *, drive: HarmonicDrive | None = None,
                 samples: np.ndarray | None = None):
        if (drive is None) == (samples is None):
            raise ValueError("give exactly one of drive or samples")
        if n_steps < 1 or duration <= 0:
            raise ValueError("need n_steps >= 1 and a positive duration")
        self.duration = float(duration)
        self.n_steps = int(n_steps)
        self.drive = drive
        if samples is not None:
            samples = np.asarray(samples, dtype=complex)
            if samples.ndim != 4 or samples.shape[1] != self.n_steps + 1 or samples.shape[2:] != (2, 2):
                raise ValueError("samples must be (N, n_steps+1, 2, 2)")
            if not np.array_equal(samples[:, 0], np.broadcast_to(np.eye(2), samples[:, 0].shape)):
                raise ValueError("U_n(0) must be the identity")
            self.__dict__["samples"] = samples

    @property
    def n_sites(self) -> int:
        return self.drive.freq.size if self.drive is not None else self.samples.shape[0]

    @property
    def dt(self) -> float:
        return self.duration / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.duration, self.n_steps + 1)

    @cached_property
    def samples(self) -> np.ndarray:
        return _kernels.propagate(self.drive.coef, self.drive.freq, self.duration, self.n_steps, store=True)

    def final(self) -> np.ndarray:
        """``(N, 2, 2)`` end-of-loop unitaries."""
        if "samples" in self.__dict__ or self.drive is None:
            return self.samples[:, -1]
        return _kernels.propagate(self.drive.coef, self.drive.freq, self.duration, self.n_steps, store=False)

    def unitarity_defect(self) -> float:
        u = self.samples
        prod = np.einsum("njca,njcb->njab", u.conj(), u)
        return float(np.max(np.abs(prod - np.eye(2))))


def pt_drive(alphas: Sequence[float], duration: float = 1.0) -> HarmonicDrive:
    """Lab-frame Hamiltonian of ``exp(-i w t n.sigma/2) exp(+i w cos(a) t sigma_z/2)``.

    ``n = (sin a, 0, cos a)`` and ``w = 2 pi / T``. Writing the rotated
    ``sigma_z`` out with Rodrigues' formula gives a single-frequency drive.
    """
    a = np.asarray(alphas, dtype=float).reshape(-1)
    w = 2 * math.pi / duration
    sa, ca = np.sin(a), np.cos(a)
    coef = np.zeros((a.size, 4, 3))
    coef[:, 1, 0] = 0.5 * w * sa**3
    coef[:, 1, 1] = 0.5 * w * sa * ca**2
    coef[:, 2, 2] = 0.5 * w * sa * ca
    coef[:, 3, 0] = 0.5 * w * ca * sa**2
    coef[:, 3, 1] = -0.5 * w * ca * sa**2
    return HarmonicDrive(coef, np.full(a.size, w))


def pt_exact(alpha: float, t, duration: float = 1.0) -> np.ndarray:
    """Closed form of the tilted-precession path at times ``t`` (test reference)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    w = 2 * math.pi / duration
    nx, nz = math.sin(alpha), math.cos(alpha)
    th = w * t / 2
    rot = (np.cos(th)[:, None, None] * np.eye(2)
           - 1j * np.sin(th)[:, None, None] * (nx * PAULI[1] + nz * PAULI[3]))
    ph = w * nz * t / 2
    counter = np.zeros((t.size, 2, 2), dtype=complex)
    counter[:, 0, 0] = np.exp(1j * ph)
    counter[:, 1, 1] = np.exp(-1j * ph)
    return rot @ counter


def pt_loop_phase(alpha) -> np.ndarray | float:
    """Pure-state phase of ``|0>`` round the tilted loop, ``pi (1 + cos a)`` wrapped."""
    from ..core import wrap
    return wrap(math.pi * (1 + np.cos(alpha)))


def pt_alpha_for_phase(gamma: float) -> float:
    """Tilt that realises the loop phase ``gamma`` (any value mod 2 pi)."""
    g = gamma % (2 * math.pi)
    return math.acos(max(-1.0, min(1.0, g / math.pi - 1.0)))


def pt_path_z(n: int, alphas, n_steps: int = DEFAULT_STEPS, duration: float = 1.0,
              reduced_states: Sequence[ReducedQubit] | None = None) -> UnitaryPath:
    """Cyclic, parallel-transporting loop for sites whose eigenbasis is ``|0>, |1>``.

    Each site precesses about the tilted axis ``(sin a_n, 0, cos a_n)`` for one
    period while a counter-rotation about ``z`` cancels the diagonal of the
    generator. At ``t = T`` the site unitary is
    ``diag(-e^{i pi cos a}, -e^{-i pi cos a})``, so ``|0>`` returns to its ray
    with phase ``pi (1 + cos a_n)``.

    Parameters
    ----------
    n : int
        Number of sites.
    alphas : float or sequence of float
        Tilt angle(s); a scalar is shared by all sites.
    n_steps : int
        Time steps, at least 1000.
    reduced_states : sequence of ReducedQubit, optional
        If given, every state must be diagonal (``|rho01| <= 1e-10``).

    Raises
    ------
    PreconditionViolated
    """
    alphas = np.broadcast_to(np.asarray(alphas, dtype=float), (n,)).copy()
    if n_steps < MIN_PT_STEPS:
        raise PreconditionViolated(f"n_steps={n_steps} < {MIN_PT_STEPS}")
    if reduced_states is not None:
        for rq in reduced_states:
            if abs(rq.rho01) > 1e-10:
                raise PreconditionViolated("subsystem eigenbasis is not |0>, |1> (rho01 != 0)")
    return UnitaryPath(duration, n_steps, drive=pt_drive(alphas, duration))


def random_drive(n: int, rng: np.random.Generator, duration: float = 1.0, scale: float = 1.0,
                 axes: str = "ixyz") -> HarmonicDrive:
    """Random single-frequency local Hamiltonians on the chosen Pauli ``axes``."""
    coef = np.zeros((n, 4, 3))
    for a, name in enumerate("ixyz"):
        if name in axes:
            coef[:, a, :] = scale * rng.normal(size=(n, 3))
    freq = rng.uniform(0.5, 3.0, size=n) * 2 * math.pi / duration
    return HarmonicDrive(coef, freq)


def random_local_path(n: int, rng: np.random.Generator, n_steps: int = DEFAULT_STEPS,
                      duration: float = 1.0, scale: float = 1.0, axes: str = "ixyz") -> UnitaryPath:
    return UnitaryPath(duration, n_steps, drive=random_drive(n, rng, duration, scale, axes))


def _basis_matrix(eigvecs) -> np.ndarray:
    """Stack ``[(phi1, phi2), ...]`` into ``(N, 2, 2)`` with eigenvectors as columns."""
    return np.stack([np.column_stack([np.asarray(v1), np.asarray(v2)]) for v1, v2 in eigvecs])


def enforce_pt(path: UnitaryPath, eigvecs) -> UnitaryPath:
    """Remove, step by step, the part of the body-frame generator diagonal in ``eigvecs``.

    With ``B_j = U_j^dag U_{j+1} = exp(G_j)`` the corrected path is
    ``U'_{j+1} = U'_j exp(G_j - sum_i |phi_i><phi_i|G_j|phi_i><phi_i|)``,
    which satisfies ``<phi_i|U'^dag dU'/dt|phi_i> = 0`` for the fixed
    initial eigenvectors. Cyclicity is not restored.

    Parameters
    ----------
    eigvecs : sequence of (phi1, phi2)
        Orthonormal pair per site.
    """
    bases = _basis_matrix(eigvecs)
    gram = np.einsum("nca,ncb->nab", bases.conj(), bases)
    if np.max(np.abs(gram - np.eye(2))) > 1e-10:
        raise ValueError("eigenvectors are not orthonormal")
    return UnitaryPath(path.duration, path.n_steps, samples=_kernels.project_parallel(path.samples, bases))


def _derivative(u: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order finite-difference time derivative along axis 1."""
    d = np.empty_like(u)
    d[:, 2:-2] = (u[:, :-4] - 8 * u[:, 1:-3] + 8 * u[:, 3:-1] - u[:, 4:]) / (12 * h)
    d[:, 0] = (-25 * u[:, 0] + 48 * u[:, 1] - 36 * u[:, 2] + 16 * u[:, 3] - 3 * u[:, 4]) / (12 * h)
    d[:, 1] = (-3 * u[:, 0] - 10 * u[:, 1] + 18 * u[:, 2] - 6 * u[:, 3] + u[:, 4]) / (12 * h)
    d[:, -2] = (3 * u[:, -1] + 10 * u[:, -2] - 18 * u[:, -3] + 6 * u[:, -4] - u[:, -5]) / (12 * h)
    d[:, -1] = (25 * u[:, -1] - 48 * u[:, -2] + 36 * u[:, -3] - 16 * u[:, -4] + 3 * u[:, -5]) / (12 * h)
    return d


@dataclass(frozen=True)
class PTReport:
    max_violation: float
    cyclic_defect: float

    def __post_init__(self):
        if self.max_violation < 0 or self.cyclic_defect < 0:
            raise ValueError("report fields are non-negative")


def pt_report(path: UnitaryPath, eigvecs=None) -> PTReport:
    """Parallel-transport and cyclicity diagnostics of a sampled path.

    ``max_violation`` is ``max |<phi_i|U^dag dU/dt|phi_i>|`` over sites,
    eigenvectors and samples with ``dU/dt`` from fourth-order finite
    differences; ``eigvecs`` defaults to ``|0>, |1>`` on every site.
    ``cyclic_defect`` is ``max_n | 1 - |<0|U_n(T)|0>| |``.
    """
    u = path.samples
    if eigvecs is None:
        bases = np.broadcast_to(np.eye(2, dtype=complex), (u.shape[0], 2, 2))
    else:
        bases = _basis_matrix(eigvecs)
    gen = np.einsum("njca,njcb->njab", u.conj(), _derivative(u, path.dt))
    diag = np.einsum("nai,njab,nbi->nji", bases.conj(), gen, bases)
    cyc = np.abs(1 - np.abs(u[:, -1, 0, 0]))
    return PTReport(float(np.max(np.abs(diag))), float(np.max(cyc)))
