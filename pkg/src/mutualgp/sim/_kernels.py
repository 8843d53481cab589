"""Compiled inner loops for single-qubit propagation.

A site Hamiltonian is stored as ``coef[a, :]`` for ``a`` in (I, X, Y, Z):

    H_a(t) = coef[a, 0] + coef[a, 1] cos(nu t) + coef[a, 2] sin(nu t)

Steps use the two-point Gauss-Legendre Magnus expansion (fourth order),
each step being the exact exponential of a 2x2 anti-Hermitian matrix.
"""
import math

import numpy as np
from numba import njit

_SQRT3 = math.sqrt(3.0)
_C1 = 0.5 - _SQRT3 / 6.0
_C2 = 0.5 + _SQRT3 / 6.0
_RESYNC = 256


@njit(cache=True)
def _su2(vx, vy, vz):
    """exp(-i v.sigma) as four complex entries."""
    th = math.sqrt(vx * vx + vy * vy + vz * vz)
    c = math.cos(th)
    s = math.sin(th) / th if th > 1e-300 else 1.0
    a = complex(c, -s * vz)
    b = complex(-s * vy, -s * vx)
    cc = complex(s * vy, -s * vx)
    d = complex(c, s * vz)
    return a, b, cc, d


@njit(cache=True)
def _propagate_site(coef, nu, duration, n_steps, out, store):
    """Fill ``out`` with U(t_j) (store) or with U(T) in out[0] (not store)."""
    h = duration / n_steps
    cr = math.cos(nu * h)
    sr = math.sin(nu * h)
    u00 = 1.0 + 0j
    u01 = 0j
    u10 = 0j
    u11 = 1.0 + 0j
    phase = 0.0
    if store:
        out[0, 0, 0] = u00
        out[0, 0, 1] = u01
        out[0, 1, 0] = u10
        out[0, 1, 1] = u11
    c1 = 0.0
    s1 = 0.0
    c2 = 0.0
    s2 = 0.0
    for j in range(n_steps):
        t0 = j * h
        if j % _RESYNC == 0:
            c1 = math.cos(nu * (t0 + _C1 * h))
            s1 = math.sin(nu * (t0 + _C1 * h))
            c2 = math.cos(nu * (t0 + _C2 * h))
            s2 = math.sin(nu * (t0 + _C2 * h))
        h0a = coef[0, 0] + coef[0, 1] * c1 + coef[0, 2] * s1
        xa = coef[1, 0] + coef[1, 1] * c1 + coef[1, 2] * s1
        ya = coef[2, 0] + coef[2, 1] * c1 + coef[2, 2] * s1
        za = coef[3, 0] + coef[3, 1] * c1 + coef[3, 2] * s1
        h0b = coef[0, 0] + coef[0, 1] * c2 + coef[0, 2] * s2
        xb = coef[1, 0] + coef[1, 1] * c2 + coef[1, 2] * s2
        yb = coef[2, 0] + coef[2, 1] * c2 + coef[2, 2] * s2
        zb = coef[3, 0] + coef[3, 1] * c2 + coef[3, 2] * s2
        k = _SQRT3 * h * h / 6.0
        ex = 0.5 * h * (xa + xb) - k * (ya * zb - za * yb)
        ey = 0.5 * h * (ya + yb) - k * (za * xb - xa * zb)
        ez = 0.5 * h * (za + zb) - k * (xa * yb - ya * xb)
        phase += 0.5 * h * (h0a + h0b)
        a, b, c, d = _su2(ex, ey, ez)
        n00 = a * u00 + b * u10
        n01 = a * u01 + b * u11
        n10 = c * u00 + d * u10
        n11 = c * u01 + d * u11
        u00, u01, u10, u11 = n00, n01, n10, n11
        if store:
            g = complex(math.cos(phase), -math.sin(phase))
            out[j + 1, 0, 0] = g * u00
            out[j + 1, 0, 1] = g * u01
            out[j + 1, 1, 0] = g * u10
            out[j + 1, 1, 1] = g * u11
        # advance both Gauss nodes by h
        c1, s1 = c1 * cr - s1 * sr, s1 * cr + c1 * sr
        c2, s2 = c2 * cr - s2 * sr, s2 * cr + c2 * sr
    if not store:
        g = complex(math.cos(phase), -math.sin(phase))
        out[0, 0, 0] = g * u00
        out[0, 0, 1] = g * u01
        out[0, 1, 0] = g * u10
        out[0, 1, 1] = g * u11


def propagate(coef, freq, duration, n_steps, store=True):
    """Integrate every site; returns samples ``(N, n_steps+1, 2, 2)`` or finals ``(N, 2, 2)``."""
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    freq = np.ascontiguousarray(freq, dtype=np.float64)
    n_sites = coef.shape[0]
    if store:
        out = np.empty((n_sites, n_steps + 1, 2, 2), dtype=np.complex128)
        for n in range(n_sites):
            _propagate_site(coef[n], freq[n], float(duration), int(n_steps), out[n], True)
        return out
    out = np.empty((n_sites, 1, 2, 2), dtype=np.complex128)
    for n in range(n_sites):
        _propagate_site(coef[n], freq[n], float(duration), int(n_steps), out[n], False)
    return out[:, 0]


@njit(cache=True)
def _log_step(u, v):
    """Principal log of ``u^dag v`` (a 2x2 unitary) as an anti-Hermitian matrix."""
    step = np.empty((2, 2), dtype=np.complex128)
    for a in range(2):
        for b in range(2):
            step[a, b] = u[0, a].conjugate() * v[0, b] + u[1, a].conjugate() * v[1, b]
    det = step[0, 0] * step[1, 1] - step[0, 1] * step[1, 0]
    beta = 0.5 * math.atan2(det.imag, det.real)
    ph = complex(math.cos(beta), -math.sin(beta))
    a0 = step[0, 0] * ph
    b0 = step[0, 1] * ph
    sx = -b0.imag
    sy = -b0.real
    sz = -a0.imag
    sn = math.sqrt(sx * sx + sy * sy + sz * sz)
    th = math.atan2(sn, a0.real)
    f = th / sn if sn > 1e-300 else 1.0
    vx = f * sx
    vy = f * sy
    vz = f * sz
    # G = i beta I - i v.sigma
    g = np.empty((2, 2), dtype=np.complex128)
    g[0, 0] = complex(0.0, beta - vz)
    g[0, 1] = complex(-vy, -vx)
    g[1, 0] = complex(vy, -vx)
    g[1, 1] = complex(0.0, beta + vz)
    return g


@njit(cache=True)
def _comm(a, b):
    c = np.empty((2, 2), dtype=np.complex128)
    for i in range(2):
        for k in range(2):
            c[i, k] = a[i, 0] * b[0, k] + a[i, 1] * b[1, k] - b[i, 0] * a[0, k] - b[i, 1] * a[1, k]
    return c


@njit(cache=True)
def _offdiag(g, basis):
    """``g - sum_i |phi_i><phi_i|g|phi_i><phi_i|``."""
    out = g.copy()
    for i in range(2):
        d = 0j
        for a in range(2):
            for b in range(2):
                d += basis[a, i].conjugate() * g[a, b] * basis[b, i]
        for a in range(2):
            for b in range(2):
                out[a, b] -= d * basis[a, i] * basis[b, i].conjugate()
    return out


@njit(cache=True)
def _expm_ah(g):
    """exp of an anti-Hermitian 2x2 ``g = i b I - i w.sigma``."""
    bp = 0.5 * (g[0, 0] + g[1, 1]).imag
    wz = -0.5 * (g[0, 0] - g[1, 1]).imag
    wx = -g[0, 1].imag
    wy = -g[0, 1].real
    ea, eb, ec, ed = _su2(wx, wy, wz)
    gp = complex(math.cos(bp), math.sin(bp))
    e = np.empty((2, 2), dtype=np.complex128)
    e[0, 0] = ea * gp
    e[0, 1] = eb * gp
    e[1, 0] = ec * gp
    e[1, 1] = ed * gp
    return e


@njit(cache=True)
def _project_site(samples, basis, out):
    """Re-integrate one site with the generator's diagonal (in ``basis``) removed.

    Step logs satisfy ``G_j = h A - (h^3/12)[A', A] + O(h^5)`` with ``A`` the
    body-frame generator at the step midpoint. Removing only the diagonal of
    ``G_j`` would leave an ``O(h^3)`` diagonal residue per step, so the
    commutator term is rebuilt from the projected generator, with ``A'``
    taken from neighbouring steps.
    """
    m = samples.shape[0]
    n_st = m - 1
    logs = np.empty((n_st, 2, 2), dtype=np.complex128)
    for j in range(n_st):
        logs[j] = _log_step(samples[j], samples[j + 1])
    cur = np.eye(2, dtype=np.complex128)
    out[0] = cur
    for j in range(n_st):
        g = logs[j]
        # h^2 A' from neighbouring step logs (times h: logs are h A)
        if n_st < 3:
            dg = np.zeros((2, 2), dtype=np.complex128)
        elif j == 0:
            dg = 0.5 * (-3.0 * logs[0] + 4.0 * logs[1] - logs[2])
        elif j == n_st - 1:
            dg = 0.5 * (3.0 * logs[j] - 4.0 * logs[j - 1] + logs[j - 2])
        else:
            dg = 0.5 * (logs[j + 1] - logs[j - 1])
        c_full = _comm(dg, g) / 12.0
        gp_ = _offdiag(g, basis)
        c_proj = _comm(_offdiag(dg, basis), gp_) / 12.0
        new = gp_ + _offdiag(c_full, basis) - c_proj
        e = _expm_ah(new)
        nxt = np.empty((2, 2), dtype=np.complex128)
        for a in range(2):
            for b in range(2):
                nxt[a, b] = cur[a, 0] * e[0, b] + cur[a, 1] * e[1, b]
        cur = nxt
        out[j + 1] = cur


def project_parallel(samples, bases):
    """Apply :func:`_project_site` to every site; ``bases[n]`` holds eigenvectors as columns."""
    samples = np.ascontiguousarray(samples, dtype=np.complex128)
    bases = np.ascontiguousarray(bases, dtype=np.complex128)
    out = np.empty_like(samples)
    for n in range(samples.shape[0]):
        _project_site(samples[n], bases[n], out[n])
    return out


@njit(cache=True)
def _composite_overlaps(psi0, samples, lags):
    """``<Psi_j|Psi_{j+l}>`` for each lag with ``Psi_j = (x)_n U_n(t_j) psi0``.

    States are rebuilt from ``psi0`` at every sample (no accumulated drift)
    and kept in a ring buffer long enough for the largest lag.
    """
    n_sites = samples.shape[0]
    m = samples.shape[1]
    dim = psi0.shape[0]
    n_lags = lags.shape[0]
    depth = 1
    for i in range(n_lags):
        if lags[i] + 1 > depth:
            depth = lags[i] + 1
    ring = np.empty((depth, dim), dtype=np.complex128)
    out = np.zeros((n_lags, m), dtype=np.complex128)
    for j in range(m):
        slot = j % depth
        x = ring[slot]
        for a in range(dim):
            x[a] = psi0[a]
        for s in range(n_sites):
            stride = 1 << (n_sites - 1 - s)
            u00 = samples[s, j, 0, 0]
            u01 = samples[s, j, 0, 1]
            u10 = samples[s, j, 1, 0]
            u11 = samples[s, j, 1, 1]
            for base in range(0, dim, 2 * stride):
                for off in range(base, base + stride):
                    x0 = x[off]
                    x1 = x[off + stride]
                    x[off] = u00 * x0 + u01 * x1
                    x[off + stride] = u10 * x0 + u11 * x1
        for i in range(n_lags):
            l = lags[i]
            if j >= l:
                y = ring[(j - l) % depth]
                acc = 0j
                for a in range(dim):
                    acc += y[a].conjugate() * x[a]
                out[i, j - l] = acc
    return out


def composite_overlaps(psi0, samples, lags):
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    samples = np.ascontiguousarray(samples, dtype=np.complex128)
    lags = np.asarray(lags, dtype=np.int64)
    return _composite_overlaps(psi0, samples, lags)


@njit(cache=True)
def _site_overlaps(rhos, samples, lags):
    """``tr[rho_n U_n(t_j)^dag U_n(t_{j+l})]`` for every site, lag and sample."""
    n_sites = samples.shape[0]
    m = samples.shape[1]
    n_lags = lags.shape[0]
    out = np.zeros((n_sites, n_lags, m), dtype=np.complex128)
    left = np.empty((2, 2), dtype=np.complex128)
    for s in range(n_sites):
        for j in range(m):
            # left = conj(U_j) rho^T, so tr[rho U_j^dag V] = sum(left * V)
            for c in range(2):
                for b in range(2):
                    left[c, b] = (samples[s, j, c, 0].conjugate() * rhos[s, b, 0]
                                  + samples[s, j, c, 1].conjugate() * rhos[s, b, 1])
            for i in range(n_lags):
                l = lags[i]
                if j + l < m:
                    v = samples[s, j + l]
                    out[s, i, j] = (left[0, 0] * v[0, 0] + left[0, 1] * v[0, 1]
                                    + left[1, 0] * v[1, 0] + left[1, 1] * v[1, 1])
    return out


def site_overlaps(rhos, samples, lags):
    rhos = np.ascontiguousarray(rhos, dtype=np.complex128)
    samples = np.ascontiguousarray(samples, dtype=np.complex128)
    return _site_overlaps(rhos, samples, np.asarray(lags, dtype=np.int64))
