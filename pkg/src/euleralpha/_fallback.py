"""Pure-numpy backend for the hot kernels.

Mirrors the compiled extension `_core` exactly (same function names, same
argument conventions: 1-D float64 arrays, validated by the callers).  Pairwise
marker work is done with chunked broadcasting; summation order is fixed, so
repeated calls are bit-identical.
"""

import functools
import math

import numpy as np

from ._bessel_data import (
    CHEB_K0_FAR,
    CHEB_K0_MID,
    CHEB_K1_FAR,
    CHEB_K1_MID,
    EULER_GAMMA,
    SER_C,
    SER_CH,
    SER_D,
    SER_DH,
)

BACKEND_NAME = "numpy"

_LN2MG = math.log(2.0) - EULER_GAMMA
_INV_2PI = 1.0 / (2.0 * math.pi)
_INV_4PI = 1.0 / (4.0 * math.pi)

# Horner coefficient arrays (constant term last is NOT how np.polyval wants
# them; these are ascending, consumed back-to-front below).
_C1 = np.array(SER_C[1:])          # G(u)  = u * sum C1[k] u^k
_CH1 = np.array(SER_CH[1:])        # S0(u) = u * sum CH1[k] u^k
_D0 = np.array(SER_D)              # T(u)  = sum D0[k] u^k
_DH0 = np.array(SER_DH)            # S1(u) = sum DH0[k] u^k


def _horner(coefs, u):
    acc = np.full_like(u, coefs[-1])
    for c in coefs[-2::-1]:
        acc *= u
        acc += c
    return acc


def _clenshaw(coefs, t):
    b1 = np.zeros_like(t)
    b2 = np.zeros_like(t)
    t2 = 2.0 * t
    for c in coefs[:0:-1]:
        b1, b2 = c + t2 * b1 - b2, b1
    return 0.5 * coefs[0] + t * b1 - b2


def _k0pl_small(z):
    # K0(z) + ln z for 0 <= z <= 2, cancellation-free (finite ln2-gamma at 0).
    u = 0.25 * z * z
    g = u * _horner(_C1, u)
    s0 = u * _horner(_CH1, u)
    lnz = np.log(np.where(z > 0.0, z, 1.0))
    return np.where(z > 0.0, -lnz * g, 0.0) + _LN2MG * (1.0 + g) + s0


def _k1mi_small(z):
    # K1(z) - 1/z for 0 <= z <= 2; limit 0 at z = 0.
    u = 0.25 * z * z
    t = _horner(_D0, u)
    s1 = _horner(_DH0, u)
    lnz2 = np.log(np.where(z > 0.0, 0.5 * z, 1.0))
    return np.where(z > 0.0, lnz2 * (0.5 * z) * t, 0.0) - 0.25 * z * s1


def _k_large(z, cheb_mid, cheb_far):
    # z > 2: K_nu = exp(-z)/sqrt(z) * Chebyshev(F_nu); exp underflows to 0
    # gracefully for z beyond ~745.
    out = np.empty_like(z)
    mid = z <= 8.0
    far = ~mid
    if mid.any():
        zm = z[mid]
        tm = (16.0 / zm - 5.0) / 3.0
        out[mid] = np.exp(-zm) * _clenshaw(cheb_mid, tm) / np.sqrt(zm)
    if far.any():
        zf = z[far]
        tf = 16.0 / zf - 1.0
        out[far] = np.exp(-zf) * _clenshaw(cheb_far, tf) / np.sqrt(zf)
    return out


def k0(z):
    z = np.ascontiguousarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = z <= 2.0
    if small.any():
        zs = z[small]
        out[small] = _k0pl_small(zs) - np.log(zs)
    large = ~small
    if large.any():
        out[large] = _k_large(z[large], CHEB_K0_MID, CHEB_K0_FAR)
    return out


def k1(z):
    z = np.ascontiguousarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = z <= 2.0
    if small.any():
        zs = z[small]
        out[small] = 1.0 / zs + _k1mi_small(zs)
    large = ~small
    if large.any():
        out[large] = _k_large(z[large], CHEB_K1_MID, CHEB_K1_FAR)
    return out


def k0_plus_log(z):
    z = np.ascontiguousarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = z <= 2.0
    if small.any():
        out[small] = _k0pl_small(z[small])
    large = ~small
    if large.any():
        zl = z[large]
        out[large] = _k_large(zl, CHEB_K0_MID, CHEB_K0_FAR) + np.log(zl)
    return out


def k1_minus_inv(z):
    z = np.ascontiguousarray(z, dtype=np.float64)
    out = np.empty_like(z)
    small = z <= 2.0
    if small.any():
        out[small] = _k1mi_small(z[small])
    large = ~small
    if large.any():
        zl = z[large]
        out[large] = _k_large(zl, CHEB_K1_MID, CHEB_K1_FAR) - 1.0 / zl
    return out


@functools.lru_cache(maxsize=16)
def _pair_tables(m):
    # (i - j) mod m index matrix and 4*sin^2(pi*d/m) lookup, shared per size.
    idx = np.arange(m)
    d = (idx[:, None] - idx[None, :]) % m
    four_sin2 = 4.0 * np.sin(np.pi * idx / m) ** 2
    d.setflags(write=False)
    four_sin2.setflags(write=False)
    return d, four_sin2


def self_velocity_log(x, y, dx, dy, w, q0):
    """Marker velocities induced by the patch boundary itself (log kernel).

    The ln|r| kernel splits into a smooth factor (trapezoid) plus
    ln(4 sin^2(s/2)) integrated with the spectral product weights w.
    """
    m = x.shape[0]
    d, four_sin2 = _pair_tables(m)
    dxm = x[:, None] - x[None, :]
    dym = y[:, None] - y[None, :]
    r2 = dxm * dxm + dym * dym
    denom = four_sin2[d]
    np.fill_diagonal(r2, 1.0)
    np.fill_diagonal(denom, 1.0)
    smooth = 0.5 * np.log(r2 / denom)
    np.fill_diagonal(smooth, 0.5 * np.log(dx * dx + dy * dy))
    wmat = w[d]
    pref = -q0 * _INV_2PI
    u = pref * ((2.0 * np.pi / m) * (smooth @ dx) + 0.5 * (wmat @ dx))
    v = pref * ((2.0 * np.pi / m) * (smooth @ dy) + 0.5 * (wmat @ dy))
    return u, v


def self_velocity_alpha(x, y, dx, dy, w, q0, alpha):
    """Marker velocities for the screened (Bessel) kernel.

    The kernel is bounded at the diagonal but only C^0-smooth there; the
    z^2..z^6 log coefficients are split off and routed through the same
    product quadrature as the log kernel, leaving an s^8*log s remainder.
    """
    m = x.shape[0]
    d, four_sin2 = _pair_tables(m)
    dxm = x[:, None] - x[None, :]
    dym = y[:, None] - y[None, :]
    r2 = dxm * dxm + dym * dym
    z2 = r2 / (alpha * alpha)
    psi = _INV_2PI * (
        k0_plus_log(np.sqrt(z2).ravel()).reshape(m, m) + math.log(alpha)
    )
    a = -_INV_4PI * z2 * (0.25 + z2 * (1.0 / 64.0 + z2 / 2304.0))
    lg_arg = four_sin2[d]
    np.fill_diagonal(lg_arg, 1.0)
    bracket = psi - a * np.log(lg_arg)
    wa = w[d] * a
    u = -q0 * ((2.0 * np.pi / m) * (bracket @ dx) + wa @ dx)
    v = -q0 * ((2.0 * np.pi / m) * (bracket @ dy) + wa @ dy)
    return u, v


_CHUNK = 2048


def point_velocity_log(x, y, dx, dy, q0, px, py):
    """Plain-trapezoid log-kernel velocity at external points.

    Also returns each point's distance to the nearest marker (callers use it
    to decide when the near-curve layer needs an upsampled contour).  Points
    that coincide with a marker (r < 1e-300) contribute nothing from that
    marker; route such points through the self-velocity path instead.
    """
    m = x.shape[0]
    npts = px.shape[0]
    u = np.empty(npts)
    v = np.empty(npts)
    dmin = np.empty(npts)
    pref = -q0 / (2.0 * m)          # (1/2pi)*(2pi/M) folded together
    for lo in range(0, npts, _CHUNK):
        hi = min(lo + _CHUNK, npts)
        rx = px[lo:hi, None] - x[None, :]
        ry = py[lo:hi, None] - y[None, :]
        r2 = rx * rx + ry * ry
        dmin[lo:hi] = np.sqrt(r2.min(axis=1))
        lnr2 = np.log(np.where(r2 > 0.0, r2, 1.0))
        u[lo:hi] = pref * (lnr2 @ dx)
        v[lo:hi] = pref * (lnr2 @ dy)
    return u, v, dmin


def point_velocity_alpha(x, y, dx, dy, q0, alpha, px, py):
    """Plain-trapezoid screened-kernel velocity at external points."""
    m = x.shape[0]
    npts = px.shape[0]
    u = np.empty(npts)
    v = np.empty(npts)
    dmin = np.empty(npts)
    lna = math.log(alpha)
    pref = -q0 * (2.0 * np.pi / m) * _INV_2PI
    for lo in range(0, npts, _CHUNK):
        hi = min(lo + _CHUNK, npts)
        rx = px[lo:hi, None] - x[None, :]
        ry = py[lo:hi, None] - y[None, :]
        r2 = rx * rx + ry * ry
        dmin[lo:hi] = np.sqrt(r2.min(axis=1))
        z = np.sqrt(r2) / alpha
        psi = k0_plus_log(z.ravel()).reshape(z.shape) + lna
        u[lo:hi] = pref * (psi @ dx)
        v[lo:hi] = pref * (psi @ dy)
    return u, v, dmin
