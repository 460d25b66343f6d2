"""Slope fitting, guarded rate studies, and self-convergence ladders."""

import math

import numpy as np
import pytest

from euleralpha import contour as ct
from euleralpha import rates as rt
from euleralpha import solver as sv
from euleralpha.errors import ConfigError, DomainError


# -- fitting -------------------------------------------------------------------


def test_fit_loglog_recovers_exact_power():
    alphas = (0.4, 0.2, 0.1, 0.05)
    slope, intercept, r2 = rt.fit_loglog((a, 3.0 * a**2) for a in alphas)
    assert slope == pytest.approx(2.0, abs=1e-12)
    assert math.exp(intercept) == pytest.approx(3.0, rel=1e-12)
    assert r2 > 1.0 - 1e-12


def test_fit_loglog_two_points_interpolates():
    slope, _, r2 = rt.fit_loglog([(0.2, 1.2e-3), (0.1, 2.1e-4)])
    assert slope == pytest.approx(math.log(1.2e-3 / 2.1e-4) / math.log(2),
                                  rel=1e-12)
    assert r2 == pytest.approx(1.0, abs=1e-12)


def test_fit_loglog_tolerates_mild_noise():
    rng = np.random.default_rng(42)
    alphas = np.array([0.4, 0.2, 0.1, 0.05, 0.025])
    errs = alphas**1.5 * (1.0 + 0.01 * rng.standard_normal(alphas.size))
    slope, _, r2 = rt.fit_loglog(zip(alphas, errs))
    assert 1.45 < slope < 1.55
    assert r2 > 0.999


def test_fit_loglog_contracts():
    with pytest.raises(DomainError):
        rt.fit_loglog([(0.1, 1e-3)])
    with pytest.raises(DomainError):
        rt.fit_loglog([(0.1, 1e-3), (0.05, 0.0)])
    with pytest.raises(DomainError):
        rt.fit_loglog([(-0.1, 1e-3), (0.05, 1e-4)])


# -- study configuration -------------------------------------------------------


@pytest.mark.parametrize("kwargs", [
    {"kind": "lattice"},
    {"alphas": (0.2, 0.1)},
    {"alphas": (0.1, 0.2, 0.4)},
    {"alphas": (0.4, 0.2, -0.1)},
    {"times": ()},
    {"times": (1.0, 1.5)},
    {"norms": ()},
    {"norms": ("patch_l2",)},
    {"guard_multiplier": 1},
])
def test_rate_config_rejects_bad_values(kwargs):
    base = dict(kind="spectral", alphas=(0.4, 0.2, 0.1), times=(1.0,),
                norms=("h2",))
    base.update(kwargs)
    with pytest.raises(ConfigError):
        rt.RateStudyConfig(**base)


def test_rate_config_patch_norm_names():
    with pytest.raises(ConfigError):
        rt.RateStudyConfig(kind="patch", alphas=(0.4, 0.2, 0.1),
                           times=(1.0,), norms=("h2",))


def test_rate_config_kind_dependent_cfl_default():
    spec = rt.RateStudyConfig(kind="spectral", alphas=(0.4, 0.2, 0.1),
                              times=(1.0,), norms=("h2",))
    patch = rt.RateStudyConfig(kind="patch", alphas=(0.4, 0.2, 0.1),
                               times=(1.0,), norms=("patch_l2",))
    assert spec.cfl == 0.5
    assert patch.cfl == 0.2
    pinned = rt.RateStudyConfig(kind="spectral", alphas=(0.4, 0.2, 0.1),
                                times=(1.0,), norms=("h2",), cfl=0.3)
    assert pinned.cfl == 0.3


def test_rate_config_freezes_initial_descriptor():
    cfg = rt.RateStudyConfig(kind="spectral", alphas=(0.4, 0.2, 0.1),
                             times=(1.0,), norms=("h2",),
                             initial={"kind": "band_limited", "seed": 3})
    assert cfg.initial == (("kind", "band_limited"), ("seed", 3))


# -- rate studies --------------------------------------------------------------


@pytest.fixture(scope="module")
def small_study():
    cfg = rt.RateStudyConfig(
        kind="spectral", alphas=(0.4, 0.2, 0.1), times=(0.25,),
        norms=("h0", "h1"), n=32,
        initial={"kind": "band_limited", "vmax": 0.5, "seed": 3}, workers=1)
    return cfg, rt.rate_study(cfg)


def test_rate_study_rows_and_streams(small_study):
    cfg, res = small_study
    assert [(a, t, nm) for (a, t, nm, _v) in res.rows] == [
        (a, t, nm) for a in cfg.alphas for t in cfg.times for nm in cfg.norms]
    assert all(v > 0 for (*_, v) in res.rows)
    assert sorted(res.norm_streams) == [0.0, 0.1, 0.2, 0.4]
    # reference stream rows are (t, name, value) from the solver
    t0, name0, v0 = res.norm_streams[0.0][0]
    assert t0 == 0.0 and isinstance(name0, str) and np.isfinite(v0)


def test_rate_study_errors_shrink_with_alpha(small_study):
    cfg, res = small_study
    for norm in cfg.norms:
        errs = [v for (a, t, nm, v) in res.rows if nm == norm]
        assert errs[0] > errs[1] > errs[2]


def test_rate_study_guard_makes_it_conclusive(small_study):
    cfg, res = small_study
    for key, fit in res.slopes.items():
        assert res.conclusive[key]
        assert fit is not None
        slope, _, r2 = fit
        assert slope > 1.5 and r2 > 0.95
        assert res.disc_err[key] < 0.1 * min(
            v for (a, t, nm, v) in res.rows if (t, nm) == key)


def test_rate_study_is_deterministic(small_study):
    cfg, res = small_study
    again = rt.rate_study(cfg)
    assert again.rows == res.rows
    assert again.slopes == res.slopes


def test_rate_study_unresolved_initial_is_inconclusive():
    # white initial data re-instantiates differently at the guard resolution,
    # so the two passes disagree at O(1) and no slope may be quoted
    cfg = rt.RateStudyConfig(
        kind="spectral", alphas=(0.4, 0.2, 0.1), times=(0.25,), norms=("h0",),
        n=32, initial={"kind": "white", "vmax": 0.3, "seed": 1}, workers=1)
    res = rt.rate_study(cfg)
    key = (0.25, "h0")
    assert not res.conclusive[key]
    assert res.slopes[key] is None
    assert res.disc_err[key] > min(v for (*_, v) in res.rows)


# -- self-convergence -----------------------------------------------------------


def test_self_convergence_spectral_temporal_order(tmp_path):
    res = rt.self_convergence(
        sv.SimConfig(n=32, alpha=0.1, t_end=0.5), levels=4,
        initial={"kind": "band_limited", "vmax": 0.3, "seed": 5},
        kind="spectral", workers=1)
    assert not res.monotone_nonconvergence
    diffs = [row[3] for row in res.rows if row[3] is not None]
    assert all(d2 < d1 for d1, d2 in zip(diffs, diffs[1:]))
    # once space is resolved the ladder measures the RK4 step: order 4
    last_order = res.rows[-2][4]
    assert 3.7 < last_order < 4.3
    p = tmp_path / "levels.csv"
    rt.write_levels_csv(res, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "level,resolution,dt,diff,order"
    assert len(lines) == 1 + len(res.rows)
    assert lines[-1].endswith(",,")  # finest level has no diff/order


def test_self_convergence_patch_polyline_geometry():
    # a circular patch is steady; inter-level Hausdorff distances reduce to
    # the inscribed-polyline sagitta, which halves twice per marker doubling
    res = rt.self_convergence(
        ct.ContourConfig(kernel="log", t_end=0.5), levels=3,
        initial={"kind": "circle", "m": 64}, kind="patch", workers=1)
    assert not res.monotone_nonconvergence
    d0 = res.rows[0][3]
    assert d0 == pytest.approx(0.5 * (math.pi / 64) ** 2, rel=0.05)
    assert res.rows[1][4] == pytest.approx(2.0, abs=0.2)


def test_self_convergence_contracts():
    with pytest.raises(ConfigError):
        rt.self_convergence(sv.SimConfig(n=32), levels=1, workers=1)
    with pytest.raises(ConfigError):
        rt.self_convergence(ct.ContourConfig(kernel="log"), levels=2,
                            kind="spectral", workers=1)
    with pytest.raises(ConfigError):
        rt.self_convergence(sv.SimConfig(n=32), levels=2, kind="patch",
                            workers=1)


# -- CSV emission ----------------------------------------------------------------


def test_csv_writers_roundtrip_values(small_study, tmp_path):
    cfg, res = small_study
    ep = tmp_path / "errors.csv"
    sp = tmp_path / "slopes.csv"
    rt.write_errors_csv(res, ep)
    rt.write_slopes_csv(res, sp)
    elines = ep.read_text().splitlines()
    assert elines[0] == "alpha,t,norm,value"
    assert len(elines) == 1 + len(res.rows)
    # repr round-trip: parsed floats match the in-memory values exactly
    a, t, nm, v = elines[1].split(",")
    assert (float(a), float(t), nm, float(v)) == res.rows[0]
    slines = sp.read_text().splitlines()
    assert slines[0] == "t,norm,slope,intercept,r2,disc_err,conclusive"
    first = slines[1].split(",")
    assert first[-1] in ("true", "false")
    assert float(first[2]) == res.slopes[(0.25, "h0")][0]


def test_norm_stream_csv(small_study, tmp_path):
    _cfg, res = small_study
    p = tmp_path / "stream.csv"
    rt.write_norm_stream_csv(res.norm_streams[0.0], p)
    lines = p.read_text().splitlines()
    assert lines[0] == "t,name,value"
    assert len(lines) == 1 + len(res.norm_streams[0.0])


def test_summary_text_marks_inconclusive(small_study):
    _cfg, res = small_study
    txt = rt.summary_text(res)
    assert "conclusive" in txt and "slope=" in txt
    # force an inconclusive copy through the same door
    import dataclasses as dc
    bad = dc.replace(res, slopes={k: None for k in res.slopes})
    txt2 = rt.summary_text(bad)
    assert "inconclusive" in txt2


def test_worker_count_resolution(monkeypatch):
    assert rt.worker_count(3) == 3
    monkeypatch.setenv(rt.WORKERS_ENV, "2")
    assert rt.worker_count() == 2
    monkeypatch.delenv(rt.WORKERS_ENV)
    assert rt.worker_count() >= 1
