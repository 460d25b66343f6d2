#!/usr/bin/env python3
"""Timing comparison of the compiled hot-kernel extension against the numpy
fallback.

Both backends expose the same functions (see euleralpha.backend); this script
imports the two modules side by side, checks they agree to float precision on
random inputs, and reports wall time per call.  Run after building the
extension:

    python benchmarks/bench_kernels.py [--sizes 128,256,512,1024] [--repeats 5]
"""

import argparse
import math
import time

import numpy as np

try:
    from euleralpha import _core
except ImportError:
    _core = None
from euleralpha import _fallback
from euleralpha.contour import kress_weights, make_contour


def _marker_arrays(m):
    c = make_contour("perturbed_disk", m, eps=0.15)
    x = np.ascontiguousarray(c.x[:, 0])
    y = np.ascontiguousarray(c.x[:, 1])
    k = np.fft.rfftfreq(m, d=1.0 / m)
    dx = np.fft.irfft(1j * k * np.fft.rfft(x), n=m)
    dy = np.fft.irfft(1j * k * np.fft.rfft(y), n=m)
    return x, y, dx, dy, kress_weights(m)


def _time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _row(label, m, t_cy, t_np, diff):
    speed = t_np / t_cy if t_cy > 0 else float("inf")
    print(f"{label:24s} M={m:<6d} cython {t_cy * 1e3:9.3f} ms   "
          f"numpy {t_np * 1e3:9.3f} ms   x{speed:6.1f}   maxdiff {diff:.2e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="128,256,512,1024")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s]

    if _core is None:
        raise SystemExit("compiled extension not available; build it first "
                         "(pip install -e . --no-build-isolation)")
    print(f"backends: {_core.BACKEND_NAME} vs {_fallback.BACKEND_NAME}")

    rng = np.random.default_rng(0)
    z = rng.uniform(1e-6, 30.0, size=200_000)
    for name in ("k0", "k1"):
        f_cy = getattr(_core, name)
        f_np = getattr(_fallback, name)
        t_cy, out_cy = _time(lambda: f_cy(z), args.repeats)
        t_np, out_np = _time(lambda: f_np(z), args.repeats)
        _row(f"{name} (200k points)", 0, t_cy, t_np,
             np.max(np.abs(out_cy - out_np) / np.abs(out_np)))

    alpha = 0.1
    for m in sizes:
        x, y, dx, dy, w = _marker_arrays(m)
        px = np.linspace(-0.4, 0.4, 64)
        py = np.full(64, 0.05)
        cases = [
            ("self_velocity_log", lambda b: b.self_velocity_log(
                x, y, dx, dy, w, 1.0)),
            ("self_velocity_alpha", lambda b: b.self_velocity_alpha(
                x, y, dx, dy, w, 1.0, alpha)),
            ("point_velocity_log", lambda b: b.point_velocity_log(
                x, y, dx, dy, 1.0, px, py)),
            ("point_velocity_alpha", lambda b: b.point_velocity_alpha(
                x, y, dx, dy, 1.0, alpha, px, py)),
        ]
        for label, call in cases:
            t_cy, out_cy = _time(lambda: call(_core), args.repeats)
            t_np, out_np = _time(lambda: call(_fallback), args.repeats)
            diff = max(np.max(np.abs(a - b))
                       for a, b in zip(out_cy, out_np))
            _row(label, m, t_cy, t_np, diff)


if __name__ == "__main__":
    main()
