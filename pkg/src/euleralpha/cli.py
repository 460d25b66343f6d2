"""Command-line entry point.

Subcommands: run-spectral, run-contour, rate-study, self-convergence,
besov-check, bessel-table.  Study commands take a JSON config validated
against a published schema before any computation starts; the two table
utilities take flat flags.  Every run directory receives a byte-identical
copy of the config and a manifest (versions, seeds, backend — nothing
time-dependent, so reruns are byte-comparable).

Exit codes: 0 success, 2 schema violation, 3 numerical failure, 4 I/O.
Failures emit a single machine-parsable line on stderr:
    EULERALPHA_ERROR code=<n> kind=<ExceptionName> message=<json-string>
"""

import argparse
import dataclasses
import json
import math
import shutil
import sys
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .backend import BACKEND
from .errors import (
    BoxTooSmallError,
    CflError,
    ChordArcError,
    ConfigError,
    DomainError,
    EulerAlphaError,
    GridMismatchError,
    MeanFreeError,
    SelfIntersectionError,
    SnapshotFormatError,
)
from . import contour as ct
from . import rates as rt
from . import solver as sv
from . import spectral as sp
from .kernels import bessel_k

EXIT_SCHEMA = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_NUMERICAL = (
    CflError, MeanFreeError, DomainError, GridMismatchError,
    ChordArcError, SelfIntersectionError, BoxTooSmallError,
    FloatingPointError, OverflowError, ZeroDivisionError,
)

# -- config schemas (published verbatim in README) -----------------------------

_INITIAL_SCHEMA = {
    "type": "object",
    "properties": {"kind": {"type": "string"}},
    "required": ["kind"],
}

_NULLABLE_POS = {"type": ["number", "null"], "exclusiveMinimum": 0}

RUN_SPECTRAL_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "run-spectral config",
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 8},
        "alpha": {"type": "number", "minimum": 0},
        "length": {"type": "number", "exclusiveMinimum": 0},
        "t_end": {"type": "number", "minimum": 0},
        "dt": _NULLABLE_POS,
        "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "output_dt": _NULLABLE_POS,
        "record": {"type": "array", "items": {"type": "string"}},
        "initial": _INITIAL_SCHEMA,
    },
    "required": ["n", "initial"],
    "additionalProperties": False,
}

RUN_CONTOUR_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "run-contour config",
    "type": "object",
    "properties": {
        "kernel": {
            "anyOf": [{"const": "log"},
                      {"type": "number", "exclusiveMinimum": 0}],
        },
        "t_end": {"type": "number", "minimum": 0},
        "dt": _NULLABLE_POS,
        "cfl": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "output_dt": _NULLABLE_POS,
        "reparam_every": {"type": "integer", "minimum": 0},
        "max_markers": {"type": "integer", "minimum": 4},
        "holder_gamma": {"type": "number", "exclusiveMinimum": 0,
                         "maximum": 1},
        "initial": {
            "type": "object",
            "properties": {"kind": {"type": "string"},
                           "m": {"type": "integer", "minimum": 4}},
            "required": ["kind"],
        },
    },
    "required": ["initial"],
    "additionalProperties": False,
}

RATE_STUDY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "rate-study config",
    "type": "object",
    "properties": {
        "kind": {"enum": ["spectral", "patch"]},
        "alphas": {"type": "array", "minItems": 3,
                   "items": {"type": "number", "exclusiveMinimum": 0}},
        "times": {"type": "array", "minItems": 1,
                  "items": {"type": "number", "exclusiveMinimum": 0}},
        "norms": {"type": "array", "minItems": 1,
                  "items": {"type": "string"}},
        "n": {"type": "integer", "minimum": 8},
        "dt": _NULLABLE_POS,
        "cfl": {"type": ["number", "null"], "exclusiveMinimum": 0,
                "maximum": 1},
        "length": {"type": "number", "exclusiveMinimum": 0},
        "initial": _INITIAL_SCHEMA,
        "guard_multiplier": {"type": "integer", "minimum": 2},
        "box_half_width": _NULLABLE_POS,
        "box_resolution": {"type": "integer", "minimum": 16},
        "record": {"type": "array", "items": {"type": "string"}},
        "workers": {"type": ["integer", "null"], "minimum": 1},
    },
    "required": ["kind", "alphas", "times", "norms"],
    "additionalProperties": False,
}

SELF_CONVERGENCE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "self-convergence config",
    "type": "object",
    "properties": {
        "kind": {"enum": ["spectral", "patch"]},
        "levels": {"type": "integer", "minimum": 2},
        "initial": _INITIAL_SCHEMA,
        "sim": {"type": "object"},
        "workers": {"type": ["integer", "null"], "minimum": 1},
    },
    "required": ["kind", "levels", "sim"],
    "additionalProperties": False,
}

SCHEMAS = {
    "run-spectral": RUN_SPECTRAL_SCHEMA,
    "run-contour": RUN_CONTOUR_SCHEMA,
    "rate-study": RATE_STUDY_SCHEMA,
    "self-convergence": SELF_CONVERGENCE_SCHEMA,
}


# -- plumbing ------------------------------------------------------------------


def _fail(code, kind, message):
    line = (f"EULERALPHA_ERROR code={code} kind={kind} "
            f"message={json.dumps(str(message))}")
    print(line, file=sys.stderr)
    return code


def _load_config(path, schema):
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise FileNotFoundError(f"config file not readable: {p}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    jsonschema.validate(doc, schema)
    return doc


def _prepare_outdir(out, config_path):
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    if config_path is not None:
        shutil.copyfile(config_path, outdir / "config.json")
    return outdir


def _collect_seeds(doc):
    seeds = {}
    init = doc.get("initial")
    if isinstance(init, dict) and "seed" in init:
        seeds["initial"] = init["seed"]
    return seeds


def _write_manifest(outdir, command, doc, extra=None):
    manifest = {
        "command": command,
        "package": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "backend": BACKEND,
        "seeds": _collect_seeds(doc or {}),
    }
    if extra:
        manifest.update(extra)
    path = outdir / "manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")


def _require_pow2(n):
    if n < 8 or n & (n - 1):
        raise ConfigError(f"spectral grid size must be a power of two >= 8, "
                          f"got {n}")


def _spectral_initial(descr, n, length):
    kind = descr["kind"]
    params = {k: v for k, v in descr.items() if k != "kind"}
    if kind == "snapshot":
        return sp.read_snapshot(params["path"])
    return sv.make_initial(kind, n, length=length, **params)


def _contour_initial(descr):
    kind = descr["kind"]
    params = {k: v for k, v in descr.items() if k != "kind"}
    if kind == "csv":
        return ct.read_contour_csv(params["path"])
    m = params.pop("m")
    return ct.make_contour(kind, m, **params)


def _write_norm_rows(rows, path):
    with open(path, "w") as fh:
        fh.write("t,name,value\n")
        for t, name, value in rows:
            fh.write(f"{rt._fmt(t)},{name},{rt._fmt(value)}\n")


# -- subcommands ---------------------------------------------------------------


def _cmd_run_spectral(args):
    doc = _load_config(args.config, RUN_SPECTRAL_SCHEMA)
    _require_pow2(doc["n"])
    fields = {f.name: f.default for f in dataclasses.fields(sv.SimConfig)}
    kwargs = {k: v for k, v in doc.items() if k in fields and k != "record"}
    if "record" in doc:
        kwargs["record"] = tuple(doc["record"])
    config = sv.SimConfig(**kwargs)
    q0 = _spectral_initial(doc["initial"], config.n, config.length)
    result = sv.run(config, q0)
    outdir = _prepare_outdir(args.out, args.config)
    for i, (t, f) in enumerate(zip(result.times, result.fields)):
        sp.write_snapshot(f, outdir / f"snapshot_{i:04d}.eafd")
    _write_norm_rows(result.norms, outdir / "norms.csv")
    _write_manifest(outdir, "run-spectral", doc,
                    {"dt": result.dt, "steps": result.steps})
    return 0


def _cmd_run_contour(args):
    doc = _load_config(args.config, RUN_CONTOUR_SCHEMA)
    fields = {f.name: f.default for f in dataclasses.fields(ct.ContourConfig)}
    kwargs = {k: v for k, v in doc.items() if k in fields}
    config = ct.ContourConfig(**kwargs)
    c0 = _contour_initial(doc["initial"])
    result = ct.run(config, c0)
    outdir = _prepare_outdir(args.out, args.config)
    for i, c in enumerate(result.contours):
        ct.write_contour_csv(c, outdir / f"contour_{i:04d}.csv")
    with open(outdir / "monitors.csv", "w") as fh:
        fh.write("t,chord_arc,area,holder_1_gamma,max_speed\n")
        for row in result.monitors:
            fh.write(",".join(rt._fmt(v) for v in row) + "\n")
    _write_manifest(outdir, "run-contour", doc,
                    {"dt": result.dt, "steps": result.steps})
    return 0


def _cmd_rate_study(args):
    doc = _load_config(args.config, RATE_STUDY_SCHEMA)
    kwargs = dict(doc)
    if "alphas" in kwargs:
        kwargs["alphas"] = tuple(kwargs["alphas"])
    if "times" in kwargs:
        kwargs["times"] = tuple(kwargs["times"])
    if "norms" in kwargs:
        kwargs["norms"] = tuple(kwargs["norms"])
    if "record" in kwargs:
        kwargs["record"] = tuple(kwargs["record"])
    config = rt.RateStudyConfig(**kwargs)
    if config.kind == "spectral":
        _require_pow2(config.n)
    result = rt.rate_study(config)
    outdir = _prepare_outdir(args.out, args.config)
    rt.write_errors_csv(result, outdir / "errors.csv")
    rt.write_slopes_csv(result, outdir / "slopes.csv")
    for alpha, rows in sorted(result.norm_streams.items()):
        label = "reference" if alpha == 0.0 else f"alpha_{alpha:g}"
        rt.write_norm_stream_csv(rows, outdir / f"norms_{label}.csv")
    (outdir / "summary.txt").write_text(rt.summary_text(result))
    _write_manifest(outdir, "rate-study", doc)
    return 0


def _cmd_self_convergence(args):
    doc = _load_config(args.config, SELF_CONVERGENCE_SCHEMA)
    sim = doc["sim"]
    if doc["kind"] == "spectral":
        jsonschema.validate({**sim, "initial": {"kind": "x"},
                             "n": sim.get("n", 64)}, RUN_SPECTRAL_SCHEMA)
        _require_pow2(sim.get("n", 64))
        kwargs = dict(sim)
        if "record" in kwargs:
            kwargs["record"] = tuple(kwargs["record"])
        config = sv.SimConfig(**kwargs)
    else:
        jsonschema.validate({**sim, "initial": {"kind": "x"}},
                            RUN_CONTOUR_SCHEMA)
        config = ct.ContourConfig(**sim)
    result = rt.self_convergence(config, doc["levels"],
                                 initial=doc.get("initial"),
                                 kind=doc["kind"],
                                 workers=doc.get("workers"))
    outdir = _prepare_outdir(args.out, args.config)
    rt.write_levels_csv(result, outdir / "levels.csv")
    lines = ["level,resolution,dt,diff,order (see levels.csv)",
             f"monotone_nonconvergence: {result.monotone_nonconvergence}"]
    (outdir / "summary.txt").write_text("\n".join(lines) + "\n")
    _write_manifest(outdir, "self-convergence", doc)
    return 0


def _cmd_besov_check(args):
    try:
        resolutions = [int(tok) for tok in args.resolutions.split(",") if tok]
    except ValueError as exc:
        raise ConfigError(f"resolutions must be integers: {exc}") from exc
    if not resolutions or any(r < 16 for r in resolutions):
        raise ConfigError("need comma-separated resolutions >= 16")
    family = args.family
    values = []
    for n in resolutions:
        if family == "disk":
            f = sp.indicator_disk(n)
        elif family == "gaussian":
            f = sp.gaussian_bump(n)
        else:
            raise ConfigError(f"unknown family {family!r}")
        values.append(sp.besov_norm(f, 0.5, math.inf))
    mid = sorted(values)[len(values) // 2]
    spread = (max(values) - min(values)) / mid if len(values) > 1 else 0.0
    lines = [f"{n},{rt._fmt(v)}" for n, v in zip(resolutions, values)]
    body = "resolution,besov_half_inf\n" + "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(body)
    else:
        sys.stdout.write(body)
    print(f"max relative spread: {spread:.6f}")
    return 0


def _cmd_bessel_table(args):
    if args.points < 1:
        raise ConfigError("points must be >= 1")
    if not (0 < args.min <= args.max):
        raise ConfigError("need 0 < min <= max")
    z = np.linspace(args.min, args.max, args.points)
    rows = [f"{rt._fmt(float(v))},{rt._fmt(bessel_k(args.order, float(v)))}"
            for v in z]
    Path(args.out).write_text("\n".join(rows) + "\n")
    return 0


# -- dispatch ------------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="euleralpha",
        description="2D Euler / Euler-alpha numerical laboratory")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    for name in ("run-spectral", "run-contour", "rate-study",
                 "self-convergence"):
        p = subs.add_parser(name)
        p.add_argument("--config", required=True)
        if name in ("rate-study", "self-convergence"):
            p.add_argument("--out", required=True)
        else:
            p.add_argument("--out", default=".")
        p.add_argument("--verbose", "-v", action="count", default=0)

    p = subs.add_parser("besov-check")
    p.add_argument("--resolutions", required=True,
                   help="comma-separated grid sizes, e.g. 256,512,1024")
    p.add_argument("--family", default="disk", choices=("disk", "gaussian"))
    p.add_argument("--out", default=None)

    p = subs.add_parser("bessel-table")
    p.add_argument("--order", type=int, required=True, choices=(0, 1))
    p.add_argument("--min", type=float, required=True)
    p.add_argument("--max", type=float, required=True)
    p.add_argument("--points", type=int, required=True)
    p.add_argument("--out", required=True)
    return parser


_HANDLERS = {
    "run-spectral": _cmd_run_spectral,
    "run-contour": _cmd_run_contour,
    "rate-study": _cmd_rate_study,
    "self-convergence": _cmd_self_convergence,
    "besov-check": _cmd_besov_check,
    "bessel-table": _cmd_bessel_table,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (jsonschema.ValidationError, ConfigError) as exc:
        return _fail(EXIT_SCHEMA, type(exc).__name__, exc)
    except _NUMERICAL as exc:
        return _fail(EXIT_NUMERICAL, type(exc).__name__, exc)
    except (OSError, SnapshotFormatError) as exc:
        return _fail(EXIT_IO, type(exc).__name__, exc)
    except EulerAlphaError as exc:
        return _fail(EXIT_NUMERICAL, type(exc).__name__, exc)


if __name__ == "__main__":
    sys.exit(main())
