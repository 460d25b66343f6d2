"""Periodic-grid field algebra and the norm toolkit.

Transform convention (frozen for file stability): forward FFT unnormalized,
inverse carries 1/N^2; mode indices map to wavenumbers xi = 2*pi*k/L.  All
grids are square with N a power of two.  Sobolev/Besov norms use the
Plancherel weight (L^2/N^4) so that sobolev_norm(f, 0) equals the continuum
L^2 norm of the trigonometric interpolant.
"""

import functools
import math
import struct

import numpy as np

from .errors import (
    DomainError,
    GridMismatchError,
    MeanFreeError,
    SnapshotFormatError,
)

TWO_PI = 2.0 * math.pi

_HERMITIAN_RTOL = 1e-10


def _require_pow2(n):
    if n < 4 or (n & (n - 1)) != 0:
        raise DomainError(f"grid size must be a power of two >= 4, got {n}")


@functools.lru_cache(maxsize=32)
def wavenumbers(n, length):
    """(k1, k2, |k|^2) broadcastable wavenumber arrays for an n x n grid."""
    k = np.fft.fftfreq(n, d=1.0 / n) * (TWO_PI / length)
    k1 = k[:, None].copy()
    k2 = k[None, :].copy()
    ksq = k1 * k1 + k2 * k2
    for a in (k1, k2, ksq):
        a.setflags(write=False)
    return k1, k2, ksq


@functools.lru_cache(maxsize=32)
def dealias_mask(n):
    """2/3-rule square mask on mode indices: keep |k_i| <= n//3."""
    idx = np.abs(np.fft.fftfreq(n, d=1.0 / n))
    keep = idx <= (n // 3)
    mask = keep[:, None] & keep[None, :]
    mask.setflags(write=False)
    return mask


class SpectralField:
    """Real field on a periodic N x N grid with paired representations.

    Value-like: operations return new fields and never mutate inputs.
    Scalars expose .phys/.spec with shape (N, N); vectors with (2, N, N).
    """

    __slots__ = ("n", "length", "ncomp", "divergence_free", "_phys", "_spec")

    def __init__(self, n, length=TWO_PI, ncomp=1, phys=None, spec=None,
                 divergence_free=False):
        _require_pow2(n)
        if ncomp not in (1, 2):
            raise DomainError(f"ncomp must be 1 or 2, got {ncomp}")
        if phys is None and spec is None:
            phys = np.zeros((ncomp, n, n))
        self.n = n
        self.length = float(length)
        self.ncomp = ncomp
        self.divergence_free = bool(divergence_free)
        self._phys = phys
        self._spec = spec

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_phys(cls, values, length=TWO_PI, divergence_free=False):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise DomainError(f"expected (n,n) or (ncomp,n,n), got {arr.shape}")
        return cls(arr.shape[1], length, arr.shape[0], phys=arr.copy(),
                   divergence_free=divergence_free)

    @classmethod
    def from_spec(cls, coeffs, length=TWO_PI, divergence_free=False):
        arr = np.asarray(coeffs, dtype=np.complex128)
        if arr.ndim == 2:
            arr = arr[None]
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise DomainError(f"expected (n,n) or (ncomp,n,n), got {arr.shape}")
        return cls(arr.shape[1], length, arr.shape[0], spec=arr.copy(),
                   divergence_free=divergence_free)

    @classmethod
    def zeros(cls, n, length=TWO_PI, ncomp=1):
        return cls(n, length, ncomp)

    # -- representations --------------------------------------------------

    def _shape_out(self, arr):
        return arr[0] if self.ncomp == 1 else arr

    @property
    def phys(self):
        if self._phys is None:
            raw = np.fft.ifft2(self._spec, axes=(-2, -1))
            scale = np.max(np.abs(raw.real)) + 1e-300
            imax = np.max(np.abs(raw.imag))
            if imax > _HERMITIAN_RTOL * scale:
                raise DomainError(
                    "spectrum is not Hermitian-symmetric "
                    f"(imag residual {imax:.3e} vs scale {scale:.3e})"
                )
            self._phys = np.ascontiguousarray(raw.real)
        return self._shape_out(self._phys)

    @property
    def spec(self):
        if self._spec is None:
            self._spec = np.fft.fft2(self._phys, axes=(-2, -1))
        return self._shape_out(self._spec)

    def copy(self):
        return SpectralField(
            self.n, self.length, self.ncomp,
            phys=None if self._phys is None else self._phys.copy(),
            spec=None if self._spec is None else self._spec.copy(),
            divergence_free=self.divergence_free,
        )

    def grid(self):
        x = np.arange(self.n) * (self.length / self.n)
        return np.meshgrid(x, x, indexing="ij")

    def mean(self):
        spec = self._spec
        if spec is not None:
            m = spec[:, 0, 0].real / self.n**2
        else:
            m = self._phys.mean(axis=(-2, -1))
        return float(m[0]) if self.ncomp == 1 else m

    def is_mean_free(self, rtol=1e-12):
        spec = self._full_spec()
        zero = np.abs(spec[:, 0, 0])
        scale = np.max(np.abs(spec)) + 1e-300
        return bool(np.all(zero <= rtol * scale))

    def max_divergence(self):
        """max_xi |xi . v(xi)| over max |v(xi)| for flagged-vector checks."""
        if self.ncomp != 2:
            raise DomainError("divergence is defined for vector fields")
        k1, k2, _ = wavenumbers(self.n, self.length)
        spec = self._full_spec()
        div = k1 * spec[0] + k2 * spec[1]
        return float(np.max(np.abs(div)) / (np.max(np.abs(spec)) + 1e-300))

    def _full_spec(self):
        self.spec
        return self._spec

    def _full_phys(self):
        self.phys
        return self._phys

    # -- value-like arithmetic (matching grids) ---------------------------

    def _binary(self, other, op):
        if (other.n, other.length, other.ncomp) != (self.n, self.length, self.ncomp):
            raise GridMismatchError("field shapes/domains differ")
        return SpectralField(
            self.n, self.length, self.ncomp,
            spec=op(self._full_spec(), other._full_spec()),
            divergence_free=self.divergence_free and other.divergence_free,
        )

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def scaled(self, c):
        return SpectralField(self.n, self.length, self.ncomp,
                             spec=self._full_spec() * c,
                             divergence_free=self.divergence_free)


def _roundtrip_check(field):
    # used by tests: transform there and back, relative error <= 1e-12
    p = field._full_phys().copy()
    back = np.fft.ifft2(np.fft.fft2(p, axes=(-2, -1)), axes=(-2, -1)).real
    return float(np.max(np.abs(back - p)) / (np.max(np.abs(p)) + 1e-300))


# -- operators -------------------------------------------------------------


def helmholtz_filter(v, alpha):
    """Invert (1 - alpha^2 Lap): divide each mode by (1 + alpha^2 |xi|^2)."""
    if alpha < 0:
        raise DomainError("alpha must be >= 0")
    if alpha == 0:
        return v.copy()
    _, _, ksq = wavenumbers(v.n, v.length)
    return SpectralField(v.n, v.length, v.ncomp,
                         spec=v._full_spec() / (1.0 + alpha * alpha * ksq),
                         divergence_free=v.divergence_free)


def biot_savart(q, alpha=0.0):
    """Velocity from scalar vorticity: the unique zero-mean field with
    curl(out) = q filtered at length alpha (alpha = 0: plain Euler velocity).

    Per mode: u1 = i xi2 q / (|xi|^2 (1 + a^2 |xi|^2)), u2 = -i xi1 q / (...).
    Requires mean-free q: the torus cannot absorb net vorticity.
    """
    if q.ncomp != 1:
        raise DomainError("biot_savart expects a scalar vorticity field")
    if alpha < 0:
        raise DomainError("alpha must be >= 0")
    spec = q._full_spec()[0]
    scale = np.max(np.abs(spec)) + 1e-300
    if np.abs(spec[0, 0]) > 1e-10 * scale:
        raise MeanFreeError(
            f"vorticity has nonzero mean (|q_hat(0)| = {np.abs(spec[0,0]):.3e})"
        )
    k1, k2, ksq = wavenumbers(q.n, q.length)
    denom = ksq * (1.0 + alpha * alpha * ksq)
    with np.errstate(divide="ignore", invalid="ignore"):
        mult = np.where(denom > 0, 1.0 / np.where(denom > 0, denom, 1.0), 0.0)
    u1 = 1j * k2 * spec * mult
    u2 = -1j * k1 * spec * mult
    return SpectralField(q.n, q.length, 2, spec=np.stack([u1, u2]),
                         divergence_free=True)


def fractional_laplacian(f, beta):
    """Multiply f_hat by |xi|^beta; the zero mode maps to 0."""
    if beta < 0:
        raise DomainError("beta must be >= 0")
    _, _, ksq = wavenumbers(f.n, f.length)
    if beta == 0:
        mult = np.ones_like(ksq)
    else:
        mult = ksq ** (0.5 * beta)
    mult = mult.copy()
    mult[0, 0] = 0.0
    return SpectralField(f.n, f.length, f.ncomp, spec=f._full_spec() * mult,
                         divergence_free=f.divergence_free)


def gradient(f):
    """(d1 f, d2 f) of a scalar field as a vector field."""
    if f.ncomp != 1:
        raise DomainError("gradient expects a scalar field")
    k1, k2, _ = wavenumbers(f.n, f.length)
    spec = f._full_spec()[0]
    return SpectralField(f.n, f.length, 2,
                         spec=np.stack([1j * k1 * spec, 1j * k2 * spec]))


def sobolev_norm(f, s):
    """Discrete H^s norm: sqrt((L^2/N^4) sum (1+|xi|^2)^s |f_hat|^2)."""
    _, _, ksq = wavenumbers(f.n, f.length)
    w = (1.0 + ksq) ** s
    spec = f._full_spec()
    total = float(np.sum(w * (spec.real**2 + spec.imag**2)))
    return math.sqrt(total) * f.length / f.n**2


@functools.lru_cache(maxsize=32)
def _block_assignment(n, length):
    """Block index per mode: q = floor(log2(4|xi|/3)), zero mode -> minint.

    Each retained annulus satisfies 3/4 <= |xi|/2^q < 3/2, inside the
    mother-annulus range [3/4, 8/3]; every nonzero mode lands in exactly one
    block, so summing blocks reconstructs f minus its mean exactly.
    """
    _, _, ksq = wavenumbers(n, length)
    absxi = np.sqrt(ksq)
    absxi = np.where(absxi > 0, absxi, 1.0)
    q = np.floor(np.log2(4.0 * absxi / 3.0)).astype(np.int64)
    q[0, 0] = np.iinfo(np.int64).min
    q.setflags(write=False)
    return q


class DyadicBlockSet:
    """Sharp Littlewood-Paley decomposition of one field.

    Blocks are characteristic-function annuli in frequency; indices run from
    the smallest nonzero |xi| up to Nyquist.
    """

    def __init__(self, field):
        self.field = field
        qmap = _block_assignment(field.n, field.length)
        present = np.unique(qmap)
        self.indices = [int(q) for q in present if q > np.iinfo(np.int64).min]

    def block(self, q):
        qmap = _block_assignment(self.field.n, self.field.length)
        mask = qmap == q
        return SpectralField(self.field.n, self.field.length, self.field.ncomp,
                             spec=self.field._full_spec() * mask)

    def block_l2(self, q):
        qmap = _block_assignment(self.field.n, self.field.length)
        mask = qmap == q
        spec = self.field._full_spec()
        total = float(np.sum((spec.real**2 + spec.imag**2) * mask))
        return math.sqrt(total) * self.field.length / self.field.n**2

    def reconstruct(self):
        """Sum of all blocks; equals the field minus its mean."""
        spec = self.field._full_spec().copy()
        spec[:, 0, 0] = 0.0
        return SpectralField(self.field.n, self.field.length, self.field.ncomp,
                             spec=spec,
                             divergence_free=self.field.divergence_free)


def besov_norm(f, s, r):
    """Homogeneous Besov norm B^s_{2,r} from sharp dyadic blocks.

    r = math.inf gives the sup norm; 1 <= r < inf the weighted l^r sum.
    The zero mode is excluded by construction, so fields with nonzero mean
    are accepted (their mean does not contribute).  Block range is truncated
    to what the grid represents.
    """
    if not (r >= 1.0):
        raise DomainError(f"r must satisfy 1 <= r <= inf, got {r!r}")
    qmap = _block_assignment(f.n, f.length)
    spec = f._full_spec()
    energy = (spec.real**2 + spec.imag**2).sum(axis=0)
    qmin = np.iinfo(np.int64).min
    sizes = {}
    for q in np.unique(qmap):
        if q == qmin:
            continue
        sizes[int(q)] = math.sqrt(float(energy[qmap == q].sum())) * f.length / f.n**2
    terms = [2.0 ** (s * q) * l2 for q, l2 in sorted(sizes.items())]
    if not terms:
        return 0.0
    if math.isinf(r):
        return max(terms)
    return float(np.sum(np.array(terms) ** r) ** (1.0 / r))


# -- resampling ------------------------------------------------------------


def _pad_axis(a, axis, m):
    n = a.shape[axis]
    h = n // 2
    out_shape = list(a.shape)
    out_shape[axis] = m
    out = np.zeros(out_shape, dtype=np.complex128)
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    src[axis], dst[axis] = slice(0, h), slice(0, h)
    out[tuple(dst)] = a[tuple(src)]
    src[axis], dst[axis] = slice(h + 1, n), slice(m - (h - 1), m)
    out[tuple(dst)] = a[tuple(src)]
    # Nyquist bin splits evenly onto +-h (keeps the field real and exact)
    src[axis] = h
    dst[axis] = h
    out[tuple(dst)] = 0.5 * a[tuple(src)]
    dst[axis] = m - h
    out[tuple(dst)] += 0.5 * a[tuple(src)]
    return out


def upsample(field, factor):
    """Zero-padded spectral refinement to a (factor*n) grid.

    Values at the original grid points are reproduced exactly.  Nyquist
    content follows the symmetric-interpolant convention (split across the
    +-N/2 pair); fields with empty Nyquist bins (anything dealiased) refine
    with no change in any norm.
    """
    if factor < 1 or int(factor) != factor:
        raise DomainError("factor must be a positive integer")
    if factor == 1:
        return field.copy()
    m = field.n * int(factor)
    spec = field._full_spec()
    spec = _pad_axis(spec, 1, m)
    spec = _pad_axis(spec, 2, m)
    spec *= (m / field.n) ** 2
    return SpectralField(m, field.length, field.ncomp, spec=spec,
                         divergence_free=field.divergence_free)


# -- snapshot I/O ----------------------------------------------------------

_MAGIC = b"EAFD"
_HEADER = struct.Struct("<4sId II")


def write_snapshot(field, path):
    """Binary snapshot: magic 'EAFD', uint32 N, float64 L, uint32 ncomp,
    uint32 repflag (0 physical, 1 spectral), then row-major float64
    little-endian planes (spectral: re/im interleaved per element)."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, field.n, field.length, field.ncomp, 0))
        fh.write(np.ascontiguousarray(field._full_phys(), dtype="<f8").tobytes())


def read_snapshot(path):
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise SnapshotFormatError(f"{path}: truncated header")
        magic, n, length, ncomp, rep = _HEADER.unpack(head)
        if magic != _MAGIC:
            raise SnapshotFormatError(f"{path}: bad magic {magic!r}")
        if rep not in (0, 1):
            raise SnapshotFormatError(f"{path}: unknown representation {rep}")
        count = ncomp * n * n * (2 if rep else 1)
        data = np.frombuffer(fh.read(count * 8), dtype="<f8")
        if data.size != count:
            raise SnapshotFormatError(f"{path}: truncated payload")
    try:
        if rep == 0:
            arr = data.reshape(ncomp, n, n).astype(np.float64)
            return SpectralField.from_phys(arr, length)
        cplx = data.reshape(ncomp, n, n, 2)
        return SpectralField.from_spec(cplx[..., 0] + 1j * cplx[..., 1], length)
    except DomainError as exc:
        raise SnapshotFormatError(f"{path}: {exc}") from exc


# -- canned fields ---------------------------------------------------------


def indicator_disk(n, length=TWO_PI, center=None, radius=1.0, level=1.0,
                   subsamples=4):
    """Rasterized disk indicator with subpixel-coverage antialiasing."""
    _require_pow2(n)
    if center is None:
        center = (length / 2.0, length / 2.0)
    h = length / n
    off = (np.arange(subsamples) + 0.5) / subsamples * h
    x = np.arange(n) * h
    cov = np.zeros((n, n))
    for ox in off:
        for oy in off:
            xx = x[:, None] + ox - center[0]
            yy = x[None, :] + oy - center[1]
            cov += (xx * xx + yy * yy) <= radius * radius
    cov *= level / subsamples**2
    return SpectralField.from_phys(cov, length)


def gaussian_bump(n, length=TWO_PI, center=None, sigma=0.5, amplitude=1.0,
                  mean_free=True):
    """Radial Gaussian bump, optionally mean-subtracted (torus-compatible)."""
    _require_pow2(n)
    if center is None:
        center = (length / 2.0, length / 2.0)
    x = np.arange(n) * (length / n)
    xx = x[:, None] - center[0]
    yy = x[None, :] - center[1]
    vals = amplitude * np.exp(-(xx * xx + yy * yy) / (2.0 * sigma * sigma))
    if mean_free:
        vals = vals - vals.mean()
    return SpectralField.from_phys(vals, length)
