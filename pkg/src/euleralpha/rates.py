"""Convergence-rate harness: alpha sweeps, resolution guards, slope fits.

A rate study runs one plain-model reference and one filtered-model run per
alpha on identical initial data, measures the requested difference norms at
the evaluation times, and fits log-log slopes.  Every study is repeated at
guard_multiplier x resolution (and dt / guard_multiplier); the worst
disagreement between the two passes is the discretization-error estimate,
and slopes are reported only when that estimate is at most 10% of the
smallest error in the fit.
"""

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import contour as ct
from . import solver as sv
from .errors import ConfigError, DomainError
from .spectral import SpectralField, TWO_PI

WORKERS_ENV = "EULERALPHA_WORKERS"


def fit_loglog(pairs):
    """Least-squares line through (log alpha, log error) -> (slope,
    intercept, r2)."""
    pts = list(pairs)
    if len(pts) < 2:
        raise DomainError("need at least 2 (alpha, error) pairs")
    a = np.array([p[0] for p in pts], dtype=np.float64)
    e = np.array([p[1] for p in pts], dtype=np.float64)
    if np.any(a <= 0) or np.any(e <= 0):
        raise DomainError("alphas and errors must be positive for a log fit")
    x = np.log(a)
    y = np.log(e)
    design = np.stack([x, np.ones_like(x)], axis=1)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(coef[0]), float(coef[1]), r2


def worker_count(requested=None):
    if requested:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclasses.dataclass(frozen=True)
class RateStudyConfig:
    kind: str                  # "spectral" | "patch"
    alphas: tuple              # strictly decreasing, length >= 3
    times: tuple               # evaluation times (multiples of the smallest)
    norms: tuple               # e.g. ("h2", "h3") or ("patch_l2",)
    n: int = 256               # grid size (spectral) / marker count (patch)
    dt: float = None           # shared step (None: from the reference run)
    cfl: float = None          # None: the solver's own default per kind
    length: float = TWO_PI
    initial: tuple = (("kind", "band_limited"),)   # descriptor as item pairs
    guard_multiplier: int = 2
    box_half_width: float = None
    box_resolution: int = 256
    record: tuple = sv.DEFAULT_RECORD
    workers: int = None

    def __post_init__(self):
        if self.kind not in ("spectral", "patch"):
            raise ConfigError("kind must be 'spectral' or 'patch'")
        a = tuple(float(v) for v in self.alphas)
        if len(a) < 3:
            raise ConfigError("need at least 3 alphas")
        if any(x <= y for x, y in zip(a, a[1:])) or any(v <= 0 for v in a):
            raise ConfigError("alphas must be positive and strictly decreasing")
        t = tuple(float(v) for v in self.times)
        if not t or any(v <= 0 for v in t):
            raise ConfigError("evaluation times must be positive")
        base = min(t)
        for v in t:
            ratio = v / base
            if abs(ratio - round(ratio)) > 1e-9:
                raise ConfigError("times must be multiples of the smallest")
        if not self.norms:
            raise ConfigError("need at least one norm")
        for name in self.norms:
            if self.kind == "spectral" and not name.startswith("h"):
                raise ConfigError(f"spectral norms look like 'h2', got {name!r}")
            if self.kind == "patch" and name != "patch_l2":
                raise ConfigError(f"patch norm must be 'patch_l2', got {name!r}")
        if self.guard_multiplier < 2:
            raise ConfigError("guard multiplier must be >= 2")
        if self.cfl is None:
            object.__setattr__(self, "cfl",
                               0.5 if self.kind == "spectral" else 0.2)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "initial", _freeze(self.initial))


def _freeze(descr):
    if isinstance(descr, dict):
        return tuple(sorted(descr.items()))
    return tuple(descr)


def _thaw(descr):
    return dict(descr)


@dataclasses.dataclass
class RateStudyResult:
    config: RateStudyConfig
    rows: list                 # (alpha, t, norm, value), alpha-descending
    slopes: dict               # (t, norm) -> (slope, intercept, r2) | None
    disc_err: dict             # (t, norm) -> float
    conclusive: dict           # (t, norm) -> bool
    norm_streams: dict         # alpha (0.0 = reference) -> solver norm rows


# -- worker payloads (module-level for pickling) ------------------------------


def _spectral_job(payload):
    init = _thaw(payload["initial"])
    kind = init.pop("kind")
    q0 = sv.make_initial(kind, payload["n"], length=payload["length"], **init)
    cfg = sv.SimConfig(
        n=payload["n"], alpha=payload["alpha"], length=payload["length"],
        t_end=payload["t_end"], dt=payload["dt"], cfl=payload["cfl"],
        output_dt=payload["output_dt"], record=tuple(payload["record"]))
    res = sv.run(cfg, q0)
    wanted = payload["eval_times"]
    out = []
    for t, f in zip(res.times, res.fields):
        if any(abs(t - w) < 1e-9 for w in wanted):
            out.append((t, f._full_spec()[0]))
    return payload["alpha"], out, res.norms, res.dt


def _patch_job(payload):
    init = _thaw(payload["initial"])
    kind = init.pop("kind")
    c0 = ct.make_contour(kind, payload["m"], **init)
    kernel = "log" if payload["alpha"] == 0.0 else payload["alpha"]
    cfg = ct.ContourConfig(
        kernel=kernel, t_end=payload["t_end"], dt=payload["dt"],
        cfl=payload["cfl"], output_dt=payload["output_dt"],
        reparam_every=payload["reparam_every"])
    res = ct.run(cfg, c0)
    wanted = payload["eval_times"]
    out = []
    for t, c in zip(res.times, res.contours):
        for w in wanted:
            if abs(t - w) < 1e-9:
                out.append((w, c.x, c.q0))
                break
    return payload["alpha"], out, res.monitors, res.dt


def _run_jobs(fn, payloads, workers):
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as ex:
        return list(ex.map(fn, payloads))


# -- the study ----------------------------------------------------------------


def _spectral_errors(config, n, dt, workers):
    """(errors, streams) at resolution n and step dt: errors[(alpha, t,
    norm)] with velocities rebuilt from each run's vorticity."""
    out_dt = min(config.times)
    t_end = max(config.times)
    base = dict(
        n=n, length=config.length, dt=dt, cfl=config.cfl, t_end=t_end,
        output_dt=out_dt, record=tuple(config.record),
        eval_times=tuple(config.times), initial=config.initial)
    payloads = [dict(base, alpha=0.0)]
    payloads += [dict(base, alpha=a) for a in config.alphas]
    results = _run_jobs(_spectral_job, payloads, workers)
    ref = {t: spec for t, spec in results[0][1]}
    streams = {0.0: results[0][2]}
    errors = {}
    sobolev = tuple(float(name[1:]) for name in config.norms)
    for alpha, fields, stream, _dt in results[1:]:
        streams[alpha] = stream
        for t, spec in fields:
            qa = SpectralField.from_spec(spec, config.length)
            qr = SpectralField.from_spec(ref[t], config.length)
            nd = sv.difference_norms(qa, qr, sobolev=sobolev)
            for name in config.norms:
                errors[(alpha, t, name)] = nd[f"h{float(name[1:]):g}"]
    return errors, streams, results[0][3]


def _patch_errors(config, m, dt, workers):
    out_dt = min(config.times)
    t_end = max(config.times)
    base = dict(
        m=m, dt=dt, cfl=config.cfl, t_end=t_end, output_dt=out_dt,
        eval_times=tuple(config.times), initial=config.initial,
        reparam_every=10)
    payloads = [dict(base, alpha=0.0)]
    payloads += [dict(base, alpha=a) for a in config.alphas]
    results = _run_jobs(_patch_job, payloads, workers)
    ref = {t: (x, q0) for t, x, q0 in results[0][1]}
    streams = {0.0: results[0][2]}
    init = _thaw(config.initial)
    c0 = ct.make_contour(init.pop("kind"), config.n, **init)
    bhw = config.box_half_width
    if bhw is None:
        bhw = 4.0 * ct.diameter(c0)
    errors = {}
    for alpha, contours, stream, _dt in results[1:]:
        streams[alpha] = stream
        for t, x, q0 in contours:
            ex, eq0 = ref[t]
            value = ct.patch_l2_difference(
                ct.PatchContour(ex, eq0, t), ct.PatchContour(x, q0, t),
                box_half_width=bhw, resolution=config.box_resolution)
            errors[(alpha, t, "patch_l2")] = value
    return errors, streams, results[0][3]


def _reference_dt(config):
    """Shared step size for spectral studies, snapped so the output cadence
    is hit exactly.  Patch trajectories pick their own adaptive step (the
    marker differences are far above RK4 temporal error), so None."""
    if config.kind == "patch":
        return config.dt
    out_dt = min(config.times)
    if config.dt is not None:
        raw = config.dt
    else:
        init = _thaw(config.initial)
        q0 = sv.make_initial(init.pop("kind"), config.n,
                             length=config.length, **init)
        cfg = sv.SimConfig(n=config.n, alpha=0.0, length=config.length,
                           t_end=max(config.times), cfl=config.cfl,
                           output_dt=out_dt, record=())
        return sv.choose_dt(cfg, q0)[0]
    per = max(1, int(math.ceil(out_dt / raw - 1e-12)))
    return out_dt / per


def rate_study(config):
    workers = worker_count(config.workers)
    dt = _reference_dt(config)
    runner = _spectral_errors if config.kind == "spectral" else _patch_errors
    base_err, streams, dt_used = runner(config, config.n, dt, workers)
    guard_dt = None if dt is None else dt / config.guard_multiplier
    guard_err, _, _ = runner(config, config.n * config.guard_multiplier,
                             guard_dt, workers)

    rows = [(a, t, norm, base_err[(a, t, norm)])
            for a in config.alphas for t in config.times
            for norm in config.norms]

    slopes, disc, concl = {}, {}, {}
    for t in config.times:
        for norm in config.norms:
            errs = [base_err[(a, t, norm)] for a in config.alphas]
            gerrs = [guard_err[(a, t, norm)] for a in config.alphas]
            d = max(abs(e - g) for e, g in zip(errs, gerrs))
            disc[(t, norm)] = d
            ok = d <= 0.1 * min(errs)
            concl[(t, norm)] = ok
            slopes[(t, norm)] = (
                fit_loglog(list(zip(config.alphas, errs))) if ok else None)
    return RateStudyResult(config, rows, slopes, disc, concl, streams)


# -- self-convergence ----------------------------------------------------------


@dataclasses.dataclass
class SelfConvergenceResult:
    rows: list                  # (level, resolution, dt, diff, order)
    monotone_nonconvergence: bool


def self_convergence(config, levels, initial=None, kind="spectral",
                     workers=None):
    """Dyadic (resolution, dt) refinement of one problem; inter-level
    differences and observed orders.  `config` is a SimConfig (spectral) or
    ContourConfig (patch); `initial` a family descriptor dict."""
    if levels < 2:
        raise ConfigError("need at least 2 levels")
    workers = worker_count(workers)
    initial = _freeze(initial or {"kind": "band_limited"})
    if kind == "spectral":
        if not isinstance(config, sv.SimConfig):
            raise ConfigError("spectral self-convergence needs a SimConfig")
        init = _thaw(initial)
        q0 = sv.make_initial(init.pop("kind"), config.n,
                             length=config.length, **init)
        dt0, per = sv.choose_dt(config, q0)
        payloads = []
        for k in range(levels):
            payloads.append(dict(
                n=config.n * 2 ** k, length=config.length, alpha=config.alpha,
                dt=dt0 / 2 ** k, cfl=config.cfl, t_end=config.t_end,
                output_dt=config.t_end, record=(), initial=initial,
                eval_times=(config.t_end,)))
        results = _run_jobs(_spectral_job, payloads, workers)
        finals = [SpectralField.from_spec(r[1][-1][1], config.length)
                  for r in results]
        diffs = [sv.difference_norms(finals[k], finals[k + 1])["h0"]
                 for k in range(levels - 1)]
        resolutions = [p["n"] for p in payloads]
        dts = [p["dt"] for p in payloads]
    elif kind == "patch":
        if not isinstance(config, ct.ContourConfig):
            raise ConfigError("patch self-convergence needs a ContourConfig")
        init = _thaw(initial)
        fam = init.pop("kind")
        base_m = init.pop("m")
        c0 = ct.make_contour(fam, base_m, **init)
        if config.dt is not None:
            raw = config.dt
        else:
            spd = ct.max_marker_speed(c0, config.kernel)
            raw = config.cfl * ct.min_spacing(c0) / (1.3 * spd)
        per = max(1, int(math.ceil(config.t_end / raw - 1e-12)))
        dt0 = config.t_end / per
        alpha = 0.0 if config.kernel == "log" else float(
            ct._resolve_kernel(config.kernel)[1])
        payloads = []
        for k in range(levels):
            payloads.append(dict(
                m=base_m * 2 ** k, dt=dt0 / 2 ** k, cfl=config.cfl,
                t_end=config.t_end, output_dt=config.t_end,
                eval_times=(config.t_end,), reparam_every=0,
                initial=_freeze(dict(init, kind=fam)), alpha=alpha))
        results = _run_jobs(_patch_job, payloads, workers)
        finals = [r[1][-1][1] for r in results]
        diffs = [ct.hausdorff_polyline(finals[k], finals[k + 1])
                 for k in range(levels - 1)]
        resolutions = [p["m"] for p in payloads]
        dts = [p["dt"] for p in payloads]
    else:
        raise ConfigError("kind must be 'spectral' or 'patch'")

    rows = []
    for k in range(levels):
        diff = diffs[k] if k < levels - 1 else None
        order = (math.log2(diffs[k - 1] / diffs[k])
                 if 1 <= k < levels - 1 and diffs[k] > 0 else None)
        rows.append((k, resolutions[k], dts[k], diff, order))
    mono_bad = all(diffs[i + 1] >= diffs[i] for i in range(len(diffs) - 1)) \
        if len(diffs) >= 2 else False
    return SelfConvergenceResult(rows, mono_bad)


# -- CSV emission ---------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_errors_csv(result, path):
    with open(path, "w") as fh:
        fh.write("alpha,t,norm,value\n")
        for alpha, t, norm, value in result.rows:
            fh.write(f"{_fmt(alpha)},{_fmt(t)},{norm},{_fmt(value)}\n")


def write_slopes_csv(result, path):
    with open(path, "w") as fh:
        fh.write("t,norm,slope,intercept,r2,disc_err,conclusive\n")
        for t in result.config.times:
            for norm in result.config.norms:
                fit = result.slopes[(t, norm)]
                s, b, r2 = fit if fit is not None else (None, None, None)
                fh.write(
                    f"{_fmt(t)},{norm},{_fmt(s)},{_fmt(b)},{_fmt(r2)},"
                    f"{_fmt(result.disc_err[(t, norm)])},"
                    f"{str(result.conclusive[(t, norm)]).lower()}\n")


def write_levels_csv(result, path):
    with open(path, "w") as fh:
        fh.write("level,resolution,dt,diff,order\n")
        for level, res, dt, diff, order in result.rows:
            fh.write(f"{level},{res},{_fmt(dt)},{_fmt(diff)},{_fmt(order)}\n")


def write_norm_stream_csv(rows, path):
    with open(path, "w") as fh:
        fh.write("t,name,value\n")
        for t, name, value in rows:
            fh.write(f"{_fmt(float(t))},{name},{_fmt(float(value))}\n")


def summary_text(result):
    lines = []
    for t in result.config.times:
        for norm in result.config.norms:
            fit = result.slopes[(t, norm)]
            d = result.disc_err[(t, norm)]
            if fit is None:
                lines.append(
                    f"t={t:g} {norm}: inconclusive (disc_err={d:.3e})")
            else:
                s, _b, r2 = fit
                lines.append(
                    f"t={t:g} {norm}: slope={s:.4f} r2={r2:.6f} "
                    f"disc_err={d:.3e} conclusive")
    return "\n".join(lines) + "\n"
