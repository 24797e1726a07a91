"""Elliptic integrals and Jacobi elliptic functions in the modulus convention.

Every function takes the modulus ``q`` (not the parameter ``m = q**2``) and
accepts scalars or numpy arrays; arrays broadcast elementwise.

Complete integrals use the arithmetic-geometric mean.  Incomplete integrals
use Carlson's symmetric forms R_F and R_D after reducing the amplitude to
[-pi/2, pi/2] with quasi-periodicity.  The amplitude function is computed by
the descending Landen (AGM) scheme and polished with Newton steps on F.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "EllipticDomainError",
    "complete_K",
    "complete_E",
    "incomplete_F",
    "incomplete_E",
    "jacobi_am",
    "jacobi_sn",
    "jacobi_cn",
    "jacobi_dn",
    "dK_dq",
    "dE_dq",
    "carlson_rf",
    "carlson_rd",
]

_AGM_TOL = 1e-16
_MAX_ITER = 64


class EllipticDomainError(ValueError):
    """Raised when a modulus or argument lies outside the supported domain."""


def _unwrap(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _check_modulus(q, allow_one=False):
    q = np.asarray(q, dtype=float)
    if not np.all(np.isfinite(q)):
        raise EllipticDomainError("modulus must be finite")
    if np.any(q < 0.0):
        raise EllipticDomainError(f"modulus must satisfy q >= 0, got min {q.min()}")
    if allow_one:
        if np.any(q > 1.0):
            raise EllipticDomainError(f"modulus must satisfy q <= 1, got max {q.max()}")
    elif np.any(q >= 1.0):
        raise EllipticDomainError(f"modulus must satisfy q < 1, got max {q.max()}")
    return q


def _complementary(q):
    # sqrt(1 - q^2) without cancellation near q = 1
    return np.sqrt((1.0 - q) * (1.0 + q))


def _agm_KE(q):
    """Return (K, E) for an array of moduli in [0, 1) by the AGM."""
    a = np.ones_like(q)
    b = _complementary(q)
    c = q.copy()
    acc = 0.5 * c * c
    power = 0.5
    for _ in range(_MAX_ITER):
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        power *= 2.0
        acc = acc + power * c * c
        if np.all(np.abs(c) <= _AGM_TOL * a):
            break
    K = np.pi / (2.0 * a)
    return K, K * (1.0 - acc)


def complete_K(q):
    """Complete elliptic integral of the first kind K(q) for 0 <= q < 1."""
    q = _check_modulus(q)
    K, _ = _agm_KE(np.atleast_1d(q).astype(float))
    return _unwrap(K.reshape(q.shape))


def complete_E(q):
    """Complete elliptic integral of the second kind E(q) for 0 <= q <= 1."""
    q = _check_modulus(q, allow_one=True)
    flat = np.atleast_1d(q).astype(float)
    out = np.ones_like(flat)
    inner = flat < 1.0
    if np.any(inner):
        _, E = _agm_KE(flat[inner])
        out[inner] = E
    return _unwrap(out.reshape(q.shape))


def carlson_rf(x, y, z):
    """Carlson's symmetric integral R_F(x, y, z); at most one argument may vanish."""
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    x, y, z = x.copy(), y.copy(), z.copy()
    for _ in range(_MAX_ITER):
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * (sy + sz) + sy * sz
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        mean = (x + y + z) / 3.0
        dx, dy, dz = (mean - x) / mean, (mean - y) / mean, (mean - z) / mean
        if np.max(np.maximum(np.maximum(np.abs(dx), np.abs(dy)), np.abs(dz)), initial=0.0) < 1e-4:
            break
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0
    return series / np.sqrt(mean)


def carlson_rd(x, y, z):
    """Carlson's symmetric integral R_D(x, y, z) with z > 0."""
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, z)))
    x, y, z = x.copy(), y.copy(), z.copy()
    total = np.zeros_like(x)
    fac = 1.0
    for _ in range(_MAX_ITER):
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * (sy + sz) + sy * sz
        total = total + fac / (sz * (z + lam))
        fac *= 0.25
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        mean = 0.2 * (x + y + 3.0 * z)
        dx, dy, dz = (mean - x) / mean, (mean - y) / mean, (mean - z) / mean
        if np.max(np.maximum(np.maximum(np.abs(dx), np.abs(dy)), np.abs(dz)), initial=0.0) < 1e-4:
            break
    ea = dx * dy
    eb = dz * dz
    ec = ea - eb
    ed = ea - 6.0 * eb
    ee = ed + ec + ec
    c1, c2, c3, c4 = 3.0 / 14.0, 1.0 / 6.0, 9.0 / 22.0, 3.0 / 26.0
    c5, c6 = 0.25 * c3, 1.5 * c4
    series = 1.0 + ed * (-c1 + c5 * ed - c6 * dz * ee) + dz * (c2 * ee + dz * (-c3 * ec + dz * c4 * ea))
    return 3.0 * total + fac * series / (mean * np.sqrt(mean))


def _reduce_amplitude(x):
    # x = m*pi + r with r in [-pi/2, pi/2]
    m = np.round(np.asarray(x, dtype=float) / np.pi)
    return m, x - m * np.pi


def _principal_F(r, q):
    s, c = np.sin(r), np.cos(r)
    return s * carlson_rf(c * c, 1.0 - (q * s) ** 2, 1.0)


def _principal_E(r, q):
    s, c = np.sin(r), np.cos(r)
    cc, dd = c * c, 1.0 - (q * s) ** 2
    return s * carlson_rf(cc, dd, 1.0) - (q * q / 3.0) * s ** 3 * carlson_rd(cc, dd, 1.0)


def incomplete_F(x, q):
    """Incomplete integral of the first kind F(x, q) = int_0^x dtheta / sqrt(1 - q^2 sin^2)."""
    q = _check_modulus(q)
    x = np.asarray(x, dtype=float)
    x, q = np.broadcast_arrays(x, q)
    m, r = _reduce_amplitude(x)
    out = _principal_F(r, q)
    if np.any(m != 0.0):
        out = out + 2.0 * m * complete_K(q)
    return _unwrap(out)


def incomplete_E(x, q):
    """Incomplete integral of the second kind E(x, q) = int_0^x sqrt(1 - q^2 sin^2) dtheta."""
    q = _check_modulus(q)
    x = np.asarray(x, dtype=float)
    x, q = np.broadcast_arrays(x, q)
    m, r = _reduce_amplitude(x)
    out = _principal_E(r, q)
    if np.any(m != 0.0):
        out = out + 2.0 * m * complete_E(q)
    return _unwrap(out)


def _landen_am(u, q):
    """Amplitude on the principal range by descending Landen transformation."""
    a = np.ones_like(q)
    b = _complementary(q)
    c = q.copy()
    ratios = []
    for _ in range(_MAX_ITER):
        if np.all(np.abs(c) <= _AGM_TOL * a):
            break
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        ratios.append(c / a)
    phi = (2.0 ** len(ratios)) * a * u
    for ratio in reversed(ratios):
        phi = 0.5 * (phi + np.arcsin(np.clip(ratio * np.sin(phi), -1.0, 1.0)))
    return phi


def jacobi_am(u, q):
    """Jacobi amplitude am(u, q): the inverse of x -> F(x, q) on the real line."""
    q = _check_modulus(q)
    u = np.asarray(u, dtype=float)
    u, q = np.broadcast_arrays(u, q)
    u = u.astype(float)
    q = q.astype(float)
    K = np.asarray(complete_K(q), dtype=float)
    periods = np.round(u / (2.0 * K))
    r = u - periods * 2.0 * K
    phi = np.clip(_landen_am(r, q), -0.5 * np.pi, 0.5 * np.pi)
    lo = np.full_like(phi, -0.5 * np.pi)
    hi = np.full_like(phi, 0.5 * np.pi)
    for _ in range(8):
        resid = _principal_F(phi, q) - r
        lo = np.where(resid < 0.0, phi, lo)
        hi = np.where(resid > 0.0, phi, hi)
        step = resid * np.sqrt(1.0 - (q * np.sin(phi)) ** 2)
        trial = phi - step
        # fall back to bisection when Newton leaves the bracket
        outside = (trial < lo) | (trial > hi)
        phi = np.where(outside, 0.5 * (lo + hi), trial)
        if np.all(np.abs(step) < 1e-16):
            break
    return _unwrap(phi + periods * np.pi)


def jacobi_sn(u, q):
    """Jacobi sn(u, q) = sin am(u, q)."""
    return _unwrap(np.sin(jacobi_am(u, q)))


def jacobi_cn(u, q):
    """Jacobi cn(u, q) = cos am(u, q)."""
    return _unwrap(np.cos(jacobi_am(u, q)))


def jacobi_dn(u, q):
    """Jacobi dn(u, q) = sqrt(1 - q^2 sn^2(u, q))."""
    q = np.asarray(q, dtype=float)
    sn = np.asarray(jacobi_sn(u, q))
    return _unwrap(np.sqrt(1.0 - (q * sn) ** 2))


def dK_dq(q):
    """Derivative K'(q) = E/(q(1-q^2)) - K/q on 0 < q < 1."""
    q = _check_modulus(q)
    if np.any(q == 0.0):
        raise EllipticDomainError("dK_dq formula is singular at q = 0")
    K, E = np.asarray(complete_K(q)), np.asarray(complete_E(q))
    return _unwrap(E / (q * (1.0 - q) * (1.0 + q)) - K / q)


def dE_dq(q):
    """Derivative E'(q) = (E - K)/q on 0 < q < 1."""
    q = _check_modulus(q)
    if np.any(q == 0.0):
        raise EllipticDomainError("dE_dq formula is singular at q = 0")
    K, E = np.asarray(complete_K(q)), np.asarray(complete_E(q))
    return _unwrap((E - K) / q)
