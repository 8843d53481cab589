"""Domain types, angle bookkeeping and single-qubit reduced states.

All phases are radians. Two branch modes exist for an :class:`Angle`:

* ``principal`` -- the value lies in ``(-pi, pi]`` and comes from a
  two-argument arctangent of some complex number;
* ``unwrapped`` -- a point on the real line obtained by continuous tracking
  from an anchor (the identity evolution, where every phase is 0).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy.special import comb

from .errors import DegenerateSpectrum, ZeroMagnitude

TWO_PI = 2.0 * math.pi

#: ``r`` below this makes the 2x2 eigenbasis ill-conditioned.
DEGENERACY_TOL = 1e-9
#: ``|z|`` at or below this has no usable phase.
ZERO_MAGNITUDE_TOL = 1e-300

PRINCIPAL = "principal"
UNWRAPPED = "unwrapped"
BRANCH_MODES = (PRINCIPAL, UNWRAPPED)


def wrap(x):
    """Map angles onto ``(-pi, pi]``; works on scalars and arrays."""
    x = np.asarray(x, dtype=float)
    out = x - TWO_PI * np.ceil((x - math.pi) / TWO_PI)
    # rounding in ceil() can leave the result just outside the interval
    out = np.where(out <= -math.pi, out + TWO_PI, out)
    out = np.where(out > math.pi, out - TWO_PI, out)
    return out if out.ndim else float(out)


def angular_distance(a, b):
    """Distance between two angles on the circle, in ``[0, pi]``."""
    return np.abs(wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


@dataclass(frozen=True)
class Angle:
    value: float
    mode: str = PRINCIPAL

    def __post_init__(self):
        if self.mode not in BRANCH_MODES:
            raise ValueError(f"unknown branch mode {self.mode!r}")
        v = float(self.value)
        object.__setattr__(self, "value", v)
        if self.mode == PRINCIPAL and not math.isnan(v) and not (-math.pi < v <= math.pi):
            raise ValueError(f"principal angle {v} outside (-pi, pi]")

    def __float__(self):
        return self.value

    def principal(self) -> "Angle":
        return Angle(wrap(self.value), PRINCIPAL)

    def as_mode(self, mode: str) -> "Angle":
        if mode == self.mode:
            return self
        if mode == PRINCIPAL:
            return self.principal()
        # a principal value is a valid unwrapped value anchored at itself
        return Angle(self.value, UNWRAPPED)


def principal_arg(z: complex) -> Angle:
    """Argument of ``z`` in ``(-pi, pi]`` via ``atan2``.

    Raises
    ------
    ZeroMagnitude
        If ``|z| <= 1e-300``.
    """
    z = complex(z)
    if abs(z) <= ZERO_MAGNITUDE_TOL:
        raise ZeroMagnitude(f"phase of {z!r} is undefined")
    v = math.atan2(z.imag, z.real)
    if v <= -math.pi:
        v = math.pi
    return Angle(v, PRINCIPAL)


def unwrap(samples: Iterable, anchor: int = 0) -> list[Angle]:
    """Remove ``2*pi`` jumps from an ordered sequence of principal angles.

    The element at ``anchor`` keeps its input value; every other element
    differs from its input by an integer multiple of ``2*pi`` and adjacent
    outputs differ by less than ``pi``. This only recovers the true phase
    if the underlying adjacent steps are below ``pi`` (dense enough grid).
    """
    values = np.array([float(s) for s in samples], dtype=float)
    return [Angle(v, UNWRAPPED) for v in unwrap_array(values, anchor=anchor)]


def unwrap_array(values, anchor: int = 0, axis: int = -1) -> np.ndarray:
    """Array version of :func:`unwrap` along ``axis``."""
    values = np.asarray(values, dtype=float)
    out = np.unwrap(values, axis=axis)
    ref = np.take(values, [anchor], axis=axis)
    got = np.take(out, [anchor], axis=axis)
    return out + TWO_PI * np.round((ref - got) / TWO_PI)


def tracked_arg(s, x):
    """Continuous branch of ``arg(cos x + i s sin x)`` with value 0 at ``x = 0``.

    The point ``cos x + i s sin x`` winds around the origin once per ``2*pi``
    of ``x`` (clockwise when ``s < 0``), so for ``s != 0`` the branch passes
    through ``sign(s) * m * pi`` at ``x = m * pi``. The returned value is the
    ``atan2`` result shifted by the multiple of ``2*pi`` that puts it on that
    branch. For ``s == 0`` no continuous branch exists and the principal
    value (0 or pi) is returned.
    """
    s = np.asarray(s, dtype=float)
    x = np.asarray(x, dtype=float)
    p = np.arctan2(s * np.sin(x), np.cos(x))
    m = np.round(x / math.pi)
    y = x - m * math.pi
    with np.errstate(over="ignore", invalid="ignore"):
        estimate = np.sign(s) * m * math.pi + np.arctan(s * np.tan(y))
    out = p + TWO_PI * np.round((estimate - p) / TWO_PI)
    out = np.where(s == 0, p, out)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DickeSuperposition:
    """``sum_k a_k |N, k>`` over symmetric Dicke states of ``N`` qubits."""

    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = int(self.n_qubits)
        if n < 1:
            raise ValueError("n_qubits must be positive")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != n + 1:
            raise ValueError(f"expected {n + 1} amplitudes, got {amps.size}")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"amplitudes not normalised: sum |a_k|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "n_qubits", n)
        object.__setattr__(self, "amps", amps)

    @property
    def weights(self) -> np.ndarray:
        """Populations ``|a_k|^2``."""
        return np.abs(self.amps) ** 2

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex], normalize_tol: float = 1e-6):
        """Build from raw amplitudes, renormalising small deviations.

        Raises ``ValueError`` if ``sum |a_k|^2`` is further than
        ``normalize_tol`` from one.
        """
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > normalize_tol:
            raise ValueError(f"amplitudes not normalised (sum |a_k|^2 = {norm!r})")
        return cls(amps.size - 1, amps / math.sqrt(norm))

    @classmethod
    def dicke(cls, n: int, k: int):
        amps = np.zeros(n + 1, dtype=complex)
        amps[k] = 1.0
        return cls(n, amps)

    @classmethod
    def s_state(cls, n: int, r: float):
        """``sqrt((1+r)/2)|0...0> + sqrt((1-r)/2)|1...1>``."""
        if not 0.0 <= r <= 1.0:
            raise ValueError("r must lie in [0, 1]")
        amps = np.zeros(n + 1, dtype=complex)
        amps[0] = math.sqrt((1 + r) / 2)
        amps[n] += math.sqrt((1 - r) / 2)
        return cls.from_amplitudes(amps)

    @classmethod
    def product(cls, n: int, beta: float):
        """``(cos b|0> + sin b|1>)^{(x) N}`` written in the Dicke basis."""
        k = np.arange(n + 1)
        amps = np.sqrt(comb(n, k)) * math.cos(beta) ** (n - k) * math.sin(beta) ** k
        return cls.from_amplitudes(amps)

    def to_dict(self) -> dict:
        return {"n": self.n_qubits, "amps": [[a.real, a.imag] for a in self.amps]}


def state_from_dict(data: dict) -> DickeSuperposition:
    """Parse ``{"n": int, "amps": [[re, im], ...]}``."""
    try:
        n = int(data["n"])
        amps = [complex(float(re), float(im)) for re, im in data["amps"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state document: {exc}") from exc
    if len(amps) != n + 1:
        raise ValueError(f"expected {n + 1} amplitude pairs, got {len(amps)}")
    return DickeSuperposition.from_amplitudes(amps)


def load_state(path) -> DickeSuperposition:
    """Read a JSON state file (see :func:`state_from_dict`)."""
    return state_from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ReducedQubit:
    """Single-qubit density matrix ``[[rho00, rho01], [rho01*, rho11]]``."""

    rho00: float
    rho11: float
    rho01: complex

    def __post_init__(self):
        r00, r11, r01 = float(self.rho00), float(self.rho11), complex(self.rho01)
        if abs(r00 + r11 - 1.0) > 1e-12:
            raise ValueError(f"trace {r00 + r11!r} != 1")
        if not (-1e-12 <= r00 <= 1 + 1e-12 and -1e-12 <= r11 <= 1 + 1e-12):
            raise ValueError("populations outside [0, 1]")
        object.__setattr__(self, "rho00", r00)
        object.__setattr__(self, "rho11", r11)
        object.__setattr__(self, "rho01", r01)
        if self.r > 1 + 1e-12:
            raise ValueError(f"Bloch length {self.r!r} > 1")

    @classmethod
    def from_matrix(cls, rho) -> "ReducedQubit":
        rho = np.asarray(rho)
        return cls(rho[0, 0].real, rho[1, 1].real, rho[0, 1])

    def matrix(self) -> np.ndarray:
        return np.array([[self.rho00, self.rho01],
                         [self.rho01.conjugate(), self.rho11]], dtype=complex)

    @property
    def r(self) -> float:
        return math.hypot(self.rho00 - self.rho11, 2 * abs(self.rho01))

    @property
    def theta(self) -> float:
        # atan2(0, d) = 0 for d >= 0 gives the |0>-dominant tie-break
        return math.atan2(2 * abs(self.rho01), self.rho00 - self.rho11)

    @property
    def phi(self) -> float:
        return 0.0 if self.rho01 == 0 else -math.atan2(self.rho01.imag, self.rho01.real)

    @property
    def eigenvalues(self) -> tuple[float, float]:
        r = self.r
        return (1 + r) / 2, (1 - r) / 2

    @property
    def eigenvectors(self) -> tuple[np.ndarray, np.ndarray]:
        return eigen2(self)[3]

    @property
    def degenerate(self) -> bool:
        return self.r < DEGENERACY_TOL


def reduced_qubit(state: DickeSuperposition) -> ReducedQubit:
    """Single-site reduced state of a symmetric superposition (same on all sites)."""
    n = state.n_qubits
    k = np.arange(n + 1)
    w = state.weights
    rho00 = float(np.sum(w * (n - k)) / n)
    rho11 = float(np.sum(w * k) / n)
    a = state.amps
    kk = k[1:]
    # <0|rho_n|1>; pairs a_{k-1} with conj(a_k)
    rho01 = complex(np.sum(a[:-1] * np.conj(a[1:]) * np.sqrt(kk * (n - kk + 1))) / n)
    # guard the trace invariant against last-bit rounding
    rho11 = 1.0 - rho00 if abs(rho00 + rho11 - 1.0) < 1e-13 else rho11
    return ReducedQubit(rho00, rho11, rho01)


def eigen2(rq: ReducedQubit):
    """Bloch data and eigenvectors of a qubit density matrix.

    Returns ``(r, theta, phi, (phi1, phi2))`` where the eigenvalues are
    ``(1 +/- r)/2`` and

    ``phi1 = e^{-i phi/2} cos(theta/2)|0> + e^{i phi/2} sin(theta/2)|1>``,
    ``phi2 = -e^{-i phi/2} sin(theta/2)|0> + e^{i phi/2} cos(theta/2)|1>``.

    Raises
    ------
    DegenerateSpectrum
        If ``r < 1e-9``.
    """
    r = rq.r
    if r < DEGENERACY_TOL:
        raise DegenerateSpectrum(f"r = {r:.3g}: eigenbasis ill-defined")
    theta, phi = rq.theta, rq.phi
    em, ep = np.exp(-0.5j * phi), np.exp(0.5j * phi)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    v1 = np.array([em * c, ep * s])
    v2 = np.array([-em * s, ep * c])
    return r, theta, phi, (v1, v2)


@dataclass(frozen=True)
class LocalLoop:
    """End-of-loop data of the local unitaries: ``<0|U_n(T)|0> = c_n e^{i gamma_n}``."""

    gammas: tuple
    visibilities: tuple
    cyclic: bool = True

    def __post_init__(self):
        g = tuple(float(x) for x in self.gammas)
        c = tuple(float(x) for x in self.visibilities)
        if len(g) != len(c) or not g:
            raise ValueError("need one visibility per phase")
        if any(x < 0 or x > 1 + 1e-9 for x in c):
            raise ValueError("visibilities must lie in [0, 1]")
        if self.cyclic and any(abs(x - 1) > 1e-9 for x in c):
            raise ValueError("a cyclic loop has unit visibilities")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "visibilities", c)

    @property
    def n_sites(self) -> int:
        return len(self.gammas)

    @classmethod
    def uniform(cls, n: int, gamma: float) -> "LocalLoop":
        return cls((gamma,) * n, (1.0,) * n, True)

    @classmethod
    def from_phases(cls, gammas: Sequence[float]) -> "LocalLoop":
        return cls(tuple(gammas), (1.0,) * len(gammas), True)

    @classmethod
    def from_unitaries(cls, finals) -> "LocalLoop":
        """Read ``c_n, gamma_n`` off end-of-loop 2x2 unitaries."""
        z = np.asarray(finals)[:, 0, 0]
        c = np.minimum(np.abs(z), 1.0)
        cyclic = bool(np.all(np.abs(1 - np.abs(z)) <= 1e-9))
        return cls(tuple(np.angle(z)), tuple(c), cyclic)


@dataclass(frozen=True)
class PhaseReport:
    composite_gp: Angle
    subsystem_gps: tuple
    mutual_gp: Angle
    dynamical_composite: float = 0.0
    dynamical_subsystems: tuple = ()
    closest_separable_gp: Angle | None = None
    relative_entropy: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "subsystem_gps", tuple(self.subsystem_gps))
        object.__setattr__(self, "dynamical_subsystems", tuple(self.dynamical_subsystems))
        modes = {self.composite_gp.mode, self.mutual_gp.mode}
        modes.update(a.mode for a in self.subsystem_gps)
        if len(modes) != 1:
            raise ValueError(f"mixed branch modes {sorted(modes)}")
        expected = self.composite_gp.value - sum(a.value for a in self.subsystem_gps)
        gap = expected - self.mutual_gp.value
        if self.mutual_gp.mode == PRINCIPAL:
            gap = wrap(gap)
        if abs(gap) > 1e-12:
            raise ValueError("mutual phase inconsistent with composite and subsystem phases")

    @property
    def mode(self) -> str:
        return self.mutual_gp.mode

    def to_dict(self) -> dict:
        return {
            "branch": self.mode,
            "composite_gp": self.composite_gp.value,
            "subsystem_gps": [a.value for a in self.subsystem_gps],
            "mutual_gp": self.mutual_gp.value,
            "dynamical_composite": self.dynamical_composite,
            "dynamical_subsystems": list(self.dynamical_subsystems),
            "closest_separable_gp": None if self.closest_separable_gp is None
            else self.closest_separable_gp.value,
            "relative_entropy": self.relative_entropy,
        }
