"""Independent reference computations for the test suite.

Everything here is deliberately redundant with the package: closed forms,
arbitrary-precision special functions, and plain quadrature.  Nothing imports
from euleralpha, so a bug in the package cannot leak into its own expected
values.
"""

import math

import mpmath as mp
import numpy as np
from scipy.integrate import simpson, trapezoid
from scipy.special import k0 as _scipy_k0

mp.mp.dps = 30

EULER_GAMMA = float(mp.euler)


# -- special functions -----------------------------------------------------


def bessel_k(order, z):
    """Arbitrary-precision K_order(z) as a float."""
    return float(mp.besselk(order, mp.mpf(z)))


def bessel_i(order, z):
    return float(mp.besseli(order, mp.mpf(z)))


def screened_psi(r, alpha):
    """(1/2pi)(K0(r/alpha) + ln r) evaluated in high precision."""
    r = mp.mpf(r)
    a = mp.mpf(alpha)
    return float((mp.besselk(0, r / a) + mp.log(r)) / (2 * mp.pi))


def psi_order1_leading(r, alpha):
    """Leading near-origin term of the first radial derivative:
    -(1/4pi) (r/alpha^2) log(r/alpha)."""
    return -r / (4.0 * math.pi * alpha * alpha) * math.log(r / alpha)


# -- radial vortex profiles ------------------------------------------------


def rankine_azimuthal(r, radius=1.0, q0=1.0):
    """Azimuthal speed of the uniform disk vortex (free space)."""
    if r <= radius:
        return 0.5 * q0 * r
    return 0.5 * q0 * radius * radius / r


def filtered_rankine_azimuthal(r, alpha, radius=1.0, q0=1.0):
    """Azimuthal speed of the screened (Helmholtz-filtered) disk vortex.

    Interior/exterior modified-Bessel matching of
    (1 - alpha^2 Lap) u = u_rankine for the swirl component; continuity of
    the solution and its derivative at the jump radius fixes the
    coefficients via the Wronskian I1 K1' - I1' K1 = -1/z.
    """
    a = mp.mpf(alpha)
    R = mp.mpf(radius)
    rr = mp.mpf(r)
    if rr <= R:
        val = rr / 2 - R * mp.besselk(1, R / a) * mp.besseli(1, rr / a)
    else:
        val = R * R / (2 * rr) - R * mp.besseli(1, R / a) * mp.besselk(1, rr / a)
    return float(q0 * val)


def radial_quadrature_speed(profile, r, points=20001):
    """(1/r) * integral_0^r s * profile(s) ds by composite Simpson."""
    s = np.linspace(0.0, r, points)
    w = np.array([profile(v) for v in s]) * s
    return float(simpson(w, x=s) / r)


def smoothed_rankine_value(r, alpha, radius=1.0, q0=1.0, points=2001):
    """G^alpha-smoothed disk vorticity at radius r.

    q_s(r) = (1/(2 pi alpha^2)) int_0^R s ds int_0^{2pi} K0(d/alpha) dth,
    d = sqrt(r^2 + s^2 - 2 r s cos th); tensor quadrature (scipy's K0 is an
    independent ingredient: the package never calls scipy).
    """
    s = np.linspace(1e-9, radius, points)
    th = np.linspace(0.0, math.pi, 301)  # integrand symmetric in th
    d2 = (r * r + s[:, None] ** 2
          - 2.0 * r * s[:, None] * np.cos(th[None, :]))
    d = np.sqrt(np.maximum(d2, 0.0))  # rounding can push (r-s)^2 below zero
    kern = _scipy_k0(np.maximum(d, 1e-12) / alpha)
    inner = 2.0 * trapezoid(kern, th, axis=1)
    return q0 / (2.0 * math.pi * alpha * alpha) * trapezoid(inner * s, s)


# -- analytic advection term ----------------------------------------------


def two_mode_rhs(alpha, x1, x2):
    """Exact -(u . grad q) for q = sin x1 sin x2 + cos x2 on the 2pi torus.

    The sin x1 sin x2 part lives on |xi|^2 = 2 (filter weight A), the cos x2
    part on |xi|^2 = 1 (weight B); the self-interactions vanish and the
    cross terms collapse to a single separable product.
    """
    a2 = alpha * alpha
    A = 1.0 / (1.0 + 2.0 * a2)
    B = 1.0 / (1.0 + a2)
    return (B - 0.5 * A) * np.cos(x1) * np.sin(x2) ** 2


# -- contour helpers --------------------------------------------------------


def kress_reference(m):
    """Quadrature weights for log(4 sin^2(s/2)) by the direct trig sum.

    R_j = -(4 pi / m) [ sum_{k=1}^{m/2-1} cos(k s_j)/k + cos(m s_j / 2)/m ],
    s_j = 2 pi j / m.  O(m^2) but unambiguous.
    """
    j = np.arange(m)
    s = 2.0 * math.pi * j / m
    acc = np.zeros(m)
    for k in range(1, m // 2):
        acc += np.cos(k * s) / k
    acc += np.cos(0.5 * m * s) / m
    return -(4.0 * math.pi / m) * acc


def fit_rotation(ref, pts):
    """Angle of the best least-squares rotation mapping ref onto pts."""
    cross = float(np.sum(ref[:, 0] * pts[:, 1] - ref[:, 1] * pts[:, 0]))
    dot = float(np.sum(ref[:, 0] * pts[:, 0] + ref[:, 1] * pts[:, 1]))
    return math.atan2(cross, dot)


def ellipse_points(a, b, theta, n=4096):
    t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    x = a * np.cos(t)
    y = b * np.sin(t)
    c, s = math.cos(theta), math.sin(theta)
    return np.stack([c * x - s * y, s * x + c * y], axis=1)


def _dist_to_polyline(pts, poly):
    """Max over pts of the distance to the closed polyline through poly."""
    a = poly
    b = np.roll(poly, -1, axis=0)
    e = b - a
    ee = (e * e).sum(-1)
    w = pts[:, None, :] - a[None, :, :]
    t = np.clip((w * e[None, :, :]).sum(-1) / ee[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[..., None] * e[None, :, :]
    d2 = ((pts[:, None, :] - proj) ** 2).sum(-1)
    return float(np.sqrt(d2.min(axis=1)).max())


def hausdorff(pa, pb):
    """Symmetric Hausdorff distance between two closed marker polygons.

    Distances are measured point-to-segment, not point-to-point, so the
    metric sees shape deviation rather than parametrization gaps."""
    return max(_dist_to_polyline(pa, pb), _dist_to_polyline(pb, pa))


def moment_angle(pts):
    """Principal-axis orientation (mod pi) of the enclosed region.

    Uses polygon (area) moments via the shoelace formulas, not marker-point
    moments: point moments are weighted by the marker density, which drifts
    as boundary particles circulate, and that bias tilts the fitted angle."""
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * float(cross.sum())
    cx = float((cross * (x + xn)).sum()) / (6.0 * area)
    cy = float((cross * (y + yn)).sum()) / (6.0 * area)
    ixx = float((cross * (x * x + x * xn + xn * xn)).sum()) / 12.0
    iyy = float((cross * (y * y + y * yn + yn * yn)).sum()) / 12.0
    ixy = float((cross * (x * yn + 2.0 * x * y + 2.0 * xn * yn
                          + xn * y)).sum()) / 24.0
    mu20 = ixx / area - cx * cx
    mu02 = iyy / area - cy * cy
    mu11 = ixy / area - cx * cy
    return 0.5 * math.atan2(2.0 * mu11, mu20 - mu02)


def registered_ellipse_deviation(markers, a, b):
    """Hausdorff distance to the analytic ellipse rotated to fit.

    Registration uses only the markers' second moments, so the oracle fits a
    single rigid angle per snapshot (mod pi; an origin-centered ellipse is
    symmetric under point reflection).
    """
    th = moment_angle(markers)
    dense = ellipse_points(a, b, th, n=8192)
    return hausdorff(markers, dense), th


def far_field_speed(area, q0, d):
    """Point-vortex approximation q0 * Area / (2 pi d)."""
    return q0 * area / (2.0 * math.pi * d)


def kirchhoff_rate(a, b, q0=1.0):
    return q0 * a * b / (a + b) ** 2
