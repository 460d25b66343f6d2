# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; contract mirrors _fallback (see that module).

Serial loops with fixed summation order keep repeated calls bit-identical.
"""

import numpy as np

from libc.math cimport exp, log, sin, sqrt, M_PI

from . import _bessel_data as _bd

BACKEND_NAME = "cython"

cdef double LN2MG = log(2.0) - _bd.EULER_GAMMA
cdef double INV_2PI = 1.0 / (2.0 * M_PI)
cdef double INV_4PI = 1.0 / (4.0 * M_PI)
cdef Py_ssize_t NSER = _bd.NSER

cdef double[::1] C_K0_MID = np.array(_bd.CHEB_K0_MID)
cdef double[::1] C_K1_MID = np.array(_bd.CHEB_K1_MID)
cdef double[::1] C_K0_FAR = np.array(_bd.CHEB_K0_FAR)
cdef double[::1] C_K1_FAR = np.array(_bd.CHEB_K1_FAR)
cdef double[::1] SER_C = np.array(_bd.SER_C)
cdef double[::1] SER_CH = np.array(_bd.SER_CH)
cdef double[::1] SER_D = np.array(_bd.SER_D)
cdef double[::1] SER_DH = np.array(_bd.SER_DH)


cdef inline double _clenshaw(const double[::1] c, double t) nogil:
    cdef double b1 = 0.0, b2 = 0.0, nxt
    cdef double t2 = 2.0 * t
    cdef Py_ssize_t j
    for j in range(c.shape[0] - 1, 0, -1):
        nxt = c[j] + t2 * b1 - b2
        b2 = b1
        b1 = nxt
    return 0.5 * c[0] + t * b1 - b2


cdef inline double _k0pl_small(double z) nogil:
    # K0(z) + ln z on [0, 2]
    cdef double u = 0.25 * z * z
    cdef double g = SER_C[NSER - 1]
    cdef double s0 = SER_CH[NSER - 1]
    cdef Py_ssize_t k
    for k in range(NSER - 2, 0, -1):
        g = g * u + SER_C[k]
        s0 = s0 * u + SER_CH[k]
    g *= u
    s0 *= u
    if z > 0.0:
        return -log(z) * g + LN2MG * (1.0 + g) + s0
    return LN2MG


cdef inline double _k1mi_small(double z) nogil:
    # K1(z) - 1/z on [0, 2]
    cdef double u = 0.25 * z * z
    cdef double t = SER_D[NSER - 1]
    cdef double s1 = SER_DH[NSER - 1]
    cdef Py_ssize_t k
    for k in range(NSER - 2, -1, -1):
        t = t * u + SER_D[k]
        s1 = s1 * u + SER_DH[k]
    if z > 0.0:
        return log(0.5 * z) * (0.5 * z) * t - 0.25 * z * s1
    return 0.0


cdef inline double _k_large(double z, const double[::1] mid,
                            const double[::1] far) nogil:
    cdef double t
    if z <= 8.0:
        t = (16.0 / z - 5.0) / 3.0
        return exp(-z) * _clenshaw(mid, t) / sqrt(z)
    t = 16.0 / z - 1.0
    return exp(-z) * _clenshaw(far, t) / sqrt(z)


cdef inline double c_k0(double z) nogil:
    if z <= 2.0:
        return _k0pl_small(z) - log(z)
    return _k_large(z, C_K0_MID, C_K0_FAR)


cdef inline double c_k1(double z) nogil:
    if z <= 2.0:
        return 1.0 / z + _k1mi_small(z)
    return _k_large(z, C_K1_MID, C_K1_FAR)


cdef inline double c_k0pl(double z) nogil:
    if z <= 2.0:
        return _k0pl_small(z)
    return _k_large(z, C_K0_MID, C_K0_FAR) + log(z)


cdef inline double c_k1mi(double z) nogil:
    if z <= 2.0:
        return _k1mi_small(z)
    return _k_large(z, C_K1_MID, C_K1_FAR) - 1.0 / z


def k0(const double[::1] z):
    cdef Py_ssize_t n = z.shape[0], i
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = c_k0(z[i])
    return out_arr


def k1(const double[::1] z):
    cdef Py_ssize_t n = z.shape[0], i
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = c_k1(z[i])
    return out_arr


def k0_plus_log(const double[::1] z):
    cdef Py_ssize_t n = z.shape[0], i
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = c_k0pl(z[i])
    return out_arr


def k1_minus_inv(const double[::1] z):
    cdef Py_ssize_t n = z.shape[0], i
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    with nogil:
        for i in range(n):
            out[i] = c_k1mi(z[i])
    return out_arr


def self_velocity_log(const double[::1] x, const double[::1] y,
                      const double[::1] dx, const double[::1] dy,
                      const double[::1] w, double q0):
    cdef Py_ssize_t m = x.shape[0], i, j, d
    u_arr = np.empty(m)
    v_arr = np.empty(m)
    sin2_arr = np.empty(m)
    cdef double[::1] u = u_arr, v = v_arr, sin2 = sin2_arr
    cdef double rx, ry, r2, smooth, su, sv, ku, kv, s
    cdef double pref = -q0 * INV_2PI
    cdef double dsig = 2.0 * M_PI / m
    with nogil:
        for j in range(m):
            s = sin(M_PI * j / m)
            sin2[j] = 4.0 * s * s
        for i in range(m):
            su = 0.0
            sv = 0.0
            ku = 0.0
            kv = 0.0
            for j in range(m):
                d = ((i - j) + m) % m
                if i == j:
                    smooth = 0.5 * log(dx[i] * dx[i] + dy[i] * dy[i])
                else:
                    rx = x[i] - x[j]
                    ry = y[i] - y[j]
                    r2 = rx * rx + ry * ry
                    smooth = 0.5 * log(r2 / sin2[d])
                su += smooth * dx[j]
                sv += smooth * dy[j]
                ku += w[d] * dx[j]
                kv += w[d] * dy[j]
            u[i] = pref * (dsig * su + 0.5 * ku)
            v[i] = pref * (dsig * sv + 0.5 * kv)
    return u_arr, v_arr


def self_velocity_alpha(const double[::1] x, const double[::1] y,
                        const double[::1] dx, const double[::1] dy,
                        const double[::1] w, double q0, double alpha):
    cdef Py_ssize_t m = x.shape[0], i, j, d
    u_arr = np.empty(m)
    v_arr = np.empty(m)
    sin2_arr = np.empty(m)
    cdef double[::1] u = u_arr, v = v_arr, sin2 = sin2_arr
    cdef double rx, ry, r2, z2, psi, a, bracket, wa, bu, bv, ku, kv, s
    cdef double ln_a = log(alpha)
    cdef double a2 = alpha * alpha
    cdef double dsig = 2.0 * M_PI / m
    with nogil:
        for j in range(m):
            s = sin(M_PI * j / m)
            sin2[j] = 4.0 * s * s
        for i in range(m):
            bu = 0.0
            bv = 0.0
            ku = 0.0
            kv = 0.0
            for j in range(m):
                rx = x[i] - x[j]
                ry = y[i] - y[j]
                r2 = rx * rx + ry * ry
                z2 = r2 / a2
                psi = INV_2PI * (c_k0pl(sqrt(z2)) + ln_a)
                if i == j:
                    bracket = psi
                    wa = 0.0
                else:
                    d = ((i - j) + m) % m
                    a = -INV_4PI * z2 * (0.25 + z2 * (1.0 / 64.0 + z2 / 2304.0))
                    bracket = psi - a * log(sin2[d])
                    wa = w[d] * a
                bu += bracket * dx[j]
                bv += bracket * dy[j]
                ku += wa * dx[j]
                kv += wa * dy[j]
            u[i] = -q0 * (dsig * bu + ku)
            v[i] = -q0 * (dsig * bv + kv)
    return u_arr, v_arr


def point_velocity_log(const double[::1] x, const double[::1] y,
                       const double[::1] dx, const double[::1] dy,
                       double q0,
                       const double[::1] px, const double[::1] py):
    cdef Py_ssize_t m = x.shape[0], npts = px.shape[0], p, j
    u_arr = np.empty(npts)
    v_arr = np.empty(npts)
    dmin_arr = np.empty(npts)
    cdef double[::1] u = u_arr, v = v_arr, dmin = dmin_arr
    cdef double rx, ry, r2, lnr2, su, sv, best
    cdef double pref = -q0 / (2.0 * m)
    with nogil:
        for p in range(npts):
            su = 0.0
            sv = 0.0
            best = 1e308
            for j in range(m):
                rx = px[p] - x[j]
                ry = py[p] - y[j]
                r2 = rx * rx + ry * ry
                if r2 < best:
                    best = r2
                if r2 > 0.0:
                    lnr2 = log(r2)
                    su += lnr2 * dx[j]
                    sv += lnr2 * dy[j]
            u[p] = pref * su
            v[p] = pref * sv
            dmin[p] = sqrt(best)
    return u_arr, v_arr, dmin_arr


def point_velocity_alpha(const double[::1] x, const double[::1] y,
                         const double[::1] dx, const double[::1] dy,
                         double q0, double alpha,
                         const double[::1] px, const double[::1] py):
    cdef Py_ssize_t m = x.shape[0], npts = px.shape[0], p, j
    u_arr = np.empty(npts)
    v_arr = np.empty(npts)
    dmin_arr = np.empty(npts)
    cdef double[::1] u = u_arr, v = v_arr, dmin = dmin_arr
    cdef double rx, ry, r2, psi, su, sv, best
    cdef double ln_a = log(alpha)
    cdef double pref = -q0 / m
    with nogil:
        for p in range(npts):
            su = 0.0
            sv = 0.0
            best = 1e308
            for j in range(m):
                rx = px[p] - x[j]
                ry = py[p] - y[j]
                r2 = rx * rx + ry * ry
                if r2 < best:
                    best = r2
                psi = c_k0pl(sqrt(r2) / alpha) + ln_a
                su += psi * dx[j]
                sv += psi * dy[j]
            u[p] = pref * su
            v[p] = pref * sv
            dmin[p] = sqrt(best)
    return u_arr, v_arr, dmin_arr
