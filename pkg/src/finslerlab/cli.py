"""Command-line front end: verify | curvature | geodesic | series.

``verify`` runs the full claim matrix (constant flag curvatures, R-flatness
of the derived spray, the Funk gradient identity, the induced-spray equation,
series consistency, geodesic straightness) and writes a machine-readable
report; exit code 0 means every check passed, 1 means a tolerance failure,
2 means a configuration or input error.  ``curvature``, ``geodesic`` and
``series`` emit plottable CSV datasets.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from functools import partial

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import curvature as curv
from . import geodesics as geo
from .metrics import (FunkMetric, HilbertMetric, MetricDomainError,
                      RandersFunkMetric, SeriesMetric, SineWarpMetric,
                      ZeroCurvatureBallMetric, ZeroCurvatureMetric)
from .norms import (EuclideanNorm, QuarticNorm, domain_from_spec,
                    norm_from_spec, unit_ball)
from .sampling import base_grid, flag_grid, geodesic_starts, interior_samples

__all__ = [
    "ConfigError",
    "CheckRecord",
    "VerificationReport",
    "load_config",
    "default_config",
    "metric_from_spec",
    "run_verify",
    "main",
]


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# ---------------------------------------------------------------------------
# configuration

_DEFAULT_CONFIG = {
    "seed": 20240801,
    "dim": 2,
    "jobs": 1,
    "grid": {
        "radii": [0.14, 0.28, 0.42, 0.56, 0.70],
        "y_count": 5,
        "u_count": 8,
    },
    "samples": {
        "r_flat": 200,
        "pde": 100,
        "max_gauge": 0.7,
    },
    "anchor": {
        "k0": [0.2, 0.0],
        "randers": [0.3, 0.1],
    },
    "series": {
        "truncation": 12,
        "pde_truncation": 6,
        "psi_eps": 0.3,
        "match_points": 20,
        "match_radius": 0.18,
        "pde_points": 5,
    },
    "geodesic": {
        "count": 20,
        "t_end": 1.2,
        "tol": 1e-10,
        "max_gauge": 0.45,
    },
    "checks": {
        "negative_control": False,
    },
    "tolerances": {
        "funk_curvature": 1e-6,
        "hilbert_curvature": 1e-5,
        "k0_curvature": 1e-6,
        "randers_curvature": 1e-6,
        "r_flat": 1e-8,
        "funk_pde": 1e-9,
        "k0_inverse_pde": 1e-9,
        "k0_consistency": 1e-9,
        "series_match": 1e-8,
        "series_tail_factor": 10.0,
        "straightness": 1e-7,
        "rapcsak": 1e-9,
        "negative_control_floor": 1e-2,
    },
    "domains": [
        {"kind": "ball"},
        {"kind": "ellipsoid", "A": [[4.0, 0.5], [0.5, 1.0]]},
        {"kind": "randers", "b": [0.3, 0.1]},
    ],
    "metric": {
        "kind": "funk-ball",
    },
}


def default_config():
    return json.loads(json.dumps(_DEFAULT_CONFIG))


def _merge(base, override, path=""):
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown configuration key {where!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{where!r} must be a table")
            _merge(base[key], value, where)
        else:
            base[key] = value
    return base


def load_config(path=None):
    """Default configuration, optionally merged with a TOML file."""
    cfg = default_config()
    if path is not None:
        try:
            with open(path, "rb") as fh:
                raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from exc
        _merge(cfg, raw)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg):
    if cfg["dim"] not in (2, 3, 4):
        raise ConfigError("dim must be 2, 3 or 4")
    radii = cfg["grid"]["radii"]
    if not radii or any(not 0.0 < r < 1.0 for r in radii):
        raise ConfigError("grid radii must lie strictly inside (0, 1)")
    for name in ("k0", "randers"):
        a = cfg["anchor"][name]
        if len(a) != cfg["dim"]:
            raise ConfigError(f"anchor.{name} must have dim components")
        if math.hypot(*a) >= 1.0:
            raise ConfigError(f"anchor.{name} must lie inside the unit ball")
    if cfg["series"]["truncation"] < 1:
        raise ConfigError("series.truncation must be >= 1")
    if cfg["geodesic"]["tol"] <= 0:
        raise ConfigError("geodesic.tol must be positive")
    if not isinstance(cfg["jobs"], int) or cfg["jobs"] < 1:
        raise ConfigError("jobs must be a positive integer")
    for spec in cfg["domains"]:
        _domain_from_config(spec, cfg["dim"])  # raises on bad parameters


def _domain_from_config(spec, dim):
    kind = spec.get("kind")
    if kind == "ball":
        return unit_ball(dim)
    if kind in ("ellipsoid", "randers", "quartic", "euclidean"):
        norm_spec = dict(spec)
        norm_spec.pop("x_o", None)
        if kind == "euclidean":
            norm_spec["kind"] = "euclidean"
        try:
            return domain_from_spec({"norm": norm_spec, "x_o": spec.get("x_o")},
                                    dim)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown domain kind {kind!r}")


def _domain_label(spec):
    return spec.get("kind", "domain")


def metric_from_spec(spec, cfg):
    """Metric object for the curvature/geodesic commands."""
    dim = cfg["dim"]
    kind = spec.get("kind", "funk-ball")
    ball = unit_ball(dim)
    if kind == "funk-ball":
        return FunkMetric(ball)
    if kind == "funk-implicit":
        domain = (_domain_from_config(spec["domain"], dim)
                  if "domain" in spec else ball)
        return FunkMetric(domain, method="implicit")
    if kind == "hilbert":
        return HilbertMetric(FunkMetric(ball))
    if kind == "k0":
        anchor = spec.get("a", cfg["anchor"]["k0"])
        return ZeroCurvatureMetric(FunkMetric(ball), anchor)
    if kind == "k0-ball":
        anchor = spec.get("a", cfg["anchor"]["k0"])
        return ZeroCurvatureBallMetric(anchor, dim=dim)
    if kind == "randers-funk":
        drift = spec.get("a", cfg["anchor"]["randers"])
        return RandersFunkMetric(drift, dim=dim)
    if kind == "series":
        phi = (norm_from_spec(spec["phi"], dim) if "phi" in spec
               else EuclideanNorm(dim))
        psi = (norm_from_spec(spec["psi"], dim) if "psi" in spec
               else EuclideanNorm(dim))
        return SeriesMetric(phi, psi, spec.get("M", cfg["series"]["truncation"]))
    if kind == "sine-warp":
        return SineWarpMetric(dim)
    raise ConfigError(f"unknown metric kind {kind!r}")


# ---------------------------------------------------------------------------
# verification report

@dataclass
class CheckRecord:
    name: str
    claim: str
    samples: int
    max_residual: float
    tolerance: float
    passed: bool = field(init=False)
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.max_residual <= self.tolerance)

    def line(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.name}: max residual {self.max_residual:.3e} "
                f"(tolerance {self.tolerance:.1e}, {self.samples} samples)")

    def to_dict(self):
        return {
            "name": self.name,
            "claim": self.claim,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    records: list

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    def to_dict(self):
        return {
            "overall": "pass" if self.passed else "fail",
            "checks": [r.to_dict() for r in self.records],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# individual checks (library-level so the test suite reuses them)

def _grid_and_bases(cfg):
    g = cfg["grid"]
    triples = flag_grid(g["radii"], g["y_count"], g["u_count"])
    bases = base_grid(g["radii"], g["y_count"])
    return triples, bases


def _group_flags(triples):
    """Group (x, y, u) triples by base point so R and g are reused."""
    grouped = {}
    for x, y, u in triples:
        grouped.setdefault((tuple(x), tuple(y)), []).append(u)
    return grouped


def _pmap(worker, items, jobs):
    """Map preserving input order; optional process pool for sweeps."""
    if jobs and jobs > 1 and len(items) > 1:
        from concurrent.futures import ProcessPoolExecutor
        chunk = max(1, len(items) // (4 * jobs))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, items, chunksize=chunk))
    return [worker(item) for item in items]


def _flag_task(metric, target, group):
    (x, y), us = group
    return max(abs(s.value - target)
               for s in curv.flag_curvatures(metric, list(x), list(y), us))


def _rflat_task(metric, spray, sample):
    x, y = sample
    rop = curv.riemann(spray, x, y)
    fval = metric.value(x, y)
    return float(np.abs(rop.matrix).max()) / fval ** 2


def _pde_task(metric, sample):
    return curv.check_gradient_identity(metric, sample[0], sample[1])


def _straightness_task(spray, domain, t_end, tol, start):
    traj = geo.integrate(spray, start[0], start[1], t_end, tol=tol,
                         domain=domain)
    return geo.straightness_residual(traj), traj.stopped_early


def check_flag_curvature(metric, triples, target, name, claim, tol, jobs=1):
    groups = list(_group_flags(triples).items())
    worst = max(_pmap(partial(_flag_task, metric, target), groups, jobs))
    return CheckRecord(name, claim, len(triples), worst, tol,
                       detail={"target": target})


def check_r_flat(domain, count, seed, tol, name, max_gauge=0.7, jobs=1):
    metric = FunkMetric(domain, method="implicit")
    spray = curv.funk_spray(metric)
    samples = interior_samples(domain, count, seed, max_gauge=max_gauge)
    worst = max(_pmap(partial(_rflat_task, metric, spray), samples, jobs))
    return CheckRecord(
        name, "the spray with coefficients F y^i has vanishing Riemann "
        "curvature on every strongly convex domain", count, worst, tol)


def check_funk_pde(domain, count, seed, tol, name, max_gauge=0.7, jobs=1):
    metric = FunkMetric(domain, method="implicit")
    samples = interior_samples(domain, count, seed, max_gauge=max_gauge)
    worst = max(_pmap(partial(_pde_task, metric), samples, jobs))
    return CheckRecord(
        name, "the Funk metric satisfies F_x = F F_y", count, worst, tol)


def check_inverse_pde_grid(base, candidate, bases, tol, name, claim):
    worst = 0.0
    for x, y in bases:
        worst = max(worst, curv.check_inverse_pde(base, candidate, x, y))
    return CheckRecord(name, claim, len(bases), worst, tol)


def check_positivity_grid(metric, bases, name):
    low = math.inf
    for x, y in bases:
        low = min(low, curv.fundamental_tensor(metric, x, y).min_eigenvalue)
    rec = CheckRecord(
        name, "the fundamental tensor of the corrected metric stays positive "
        "definite", len(bases), -low, 0.0, detail={"min_eigenvalue": low})
    return rec


def check_consistency(metric_a, metric_b, bases, tol, name, claim):
    worst = 0.0
    for x, y in bases:
        va = metric_a.value(list(x), list(y))
        vb = metric_b.value(list(x), list(y))
        worst = max(worst, abs(va - vb) / abs(vb))
    return CheckRecord(name, claim, len(bases), worst, tol)


def check_rapcsak_grid(metric, bases, tol, name, expect_factor=None):
    worst = 0.0
    factor_err = 0.0
    for x, y in bases:
        report = curv.check_rapcsak(metric, x, y)
        worst = max(worst, report.residual)
        if expect_factor is not None:
            factor_err = max(factor_err,
                             abs(report.projective_factor
                                 - expect_factor(metric, x, y)))
    detail = {}
    if expect_factor is not None:
        detail["projective_factor_error"] = factor_err
        worst = max(worst, factor_err)
    return CheckRecord(
        name, "straight-line geodesics: F_{x^k y^l} y^k = F_{x^l}",
        len(bases), worst, tol, detail=detail)


def _series_match_points(count, radius):
    pts = []
    for i in range(count):
        r = radius * ((i % 4) + 1) / 4.0
        xa = 0.37 + 1.9 * i
        ya = 1.1 + 2.3 * i
        pts.append(([r * math.cos(xa), r * math.sin(xa)],
                    [math.cos(ya), math.sin(ya)]))
    return pts


def check_series_match(cfg):
    scfg = cfg["series"]
    dim = cfg["dim"]
    e = EuclideanNorm(dim)
    series = SeriesMetric(e, e, scfg["truncation"])
    closed = ZeroCurvatureBallMetric([0.0] * dim, dim=dim)
    worst = 0.0
    pts = _series_match_points(scfg["match_points"], scfg["match_radius"])
    for x, y in pts:
        worst = max(worst, abs(series.value(x, y) - closed.value(x, y)))
    return CheckRecord(
        "series-closed-form",
        "with euclidean phi = psi the truncated series metric reproduces the "
        "closed-form corrected metric", len(pts), worst,
        cfg["tolerances"]["series_match"],
        detail={"truncation": scfg["truncation"]})


def check_series_pde_tail(cfg):
    scfg = cfg["series"]
    dim = cfg["dim"]
    funk = FunkMetric(unit_ball(dim))
    series = SeriesMetric(EuclideanNorm(dim),
                          QuarticNorm(dim, scfg["psi_eps"]),
                          scfg["pde_truncation"])
    factor = cfg["tolerances"]["series_tail_factor"]
    worst_ratio = 0.0
    pts = []
    npts = scfg["pde_points"]
    for i in range(npts):
        r = 0.15 + 0.05 * (i / max(npts - 1, 1))
        xa = 0.37 + 1.9 * i
        ya = 1.1 + 2.3 * i
        pts.append(([r * math.cos(xa), r * math.sin(xa)],
                    [math.cos(ya), math.sin(ya)]))
    for x, y in pts:
        value, tail = series.value_with_tail(x, y)
        fval = funk.value(x, y)
        resid = curv.check_inverse_pde(funk, series, x, y) * fval * value
        worst_ratio = max(worst_ratio, resid / tail)
    return CheckRecord(
        "series-pde-tail",
        "the induced-spray equation residual of the truncated series is "
        "controlled by its tail estimate", len(pts), worst_ratio, factor,
        detail={"truncation": scfg["pde_truncation"]})


def check_straightness(spray, domain, cfg, seed, name, jobs=1):
    gcfg = cfg["geodesic"]
    starts = geodesic_starts(domain, gcfg["count"], seed,
                             max_gauge=gcfg["max_gauge"])
    results = _pmap(partial(_straightness_task, spray, domain,
                            gcfg["t_end"], gcfg["tol"]), starts, jobs)
    worst = max(r[0] for r in results)
    halted = sum(1 for r in results if r[1])
    return CheckRecord(
        name, "geodesics of the projectively flat sprays are straight lines",
        gcfg["count"], worst, cfg["tolerances"]["straightness"],
        detail={"boundary_halts": halted})


def run_verify(cfg):
    """The full verification matrix for a configuration."""
    tol = cfg["tolerances"]
    dim = cfg["dim"]
    if dim != 2:
        raise ConfigError("the verification matrix runs at dim = 2; "
                          "other dimensions are exercised via the library API")
    seed = cfg["seed"]
    triples, bases = _grid_and_bases(cfg)
    ball = unit_ball(dim)
    funk_closed = FunkMetric(ball)
    funk_implicit = FunkMetric(ball, method="implicit")
    hilbert = HilbertMetric(funk_closed)
    anchor = cfg["anchor"]["k0"]
    k0_origin = ZeroCurvatureBallMetric([0.0] * dim, dim=dim)
    k0_ball = ZeroCurvatureBallMetric(anchor, dim=dim)
    k0_generic = ZeroCurvatureMetric(funk_closed, anchor)
    randers = RandersFunkMetric(cfg["anchor"]["randers"], dim=dim)

    jobs = cfg["jobs"]
    records = []
    records.append(check_flag_curvature(
        funk_closed, triples, -0.25, "funk-curvature",
        "the ball Funk metric has constant flag curvature -1/4",
        tol["funk_curvature"], jobs=jobs))
    records.append(check_flag_curvature(
        hilbert, triples, -1.0, "hilbert-curvature",
        "the Hilbert metric has constant flag curvature -1",
        tol["hilbert_curvature"], jobs=jobs))
    records.append(check_flag_curvature(
        k0_origin, triples, 0.0, "k0-curvature-origin",
        "the corrected metric (closed form, anchor 0) has zero flag curvature",
        tol["k0_curvature"], jobs=jobs))
    records.append(check_flag_curvature(
        k0_ball, triples, 0.0, "k0-curvature-anchored",
        "the corrected metric (closed form, interior anchor) has zero flag "
        "curvature", tol["k0_curvature"], jobs=jobs))
    records.append(check_flag_curvature(
        k0_generic, triples, 0.0, "k0-curvature-generic",
        "the corrected metric built by differentiating the Funk metric has "
        "zero flag curvature", tol["k0_curvature"], jobs=jobs))
    records.append(check_flag_curvature(
        randers, triples, -0.25, "randers-curvature",
        "the Randers-type perturbed Funk metric has constant flag curvature "
        "-1/4", tol["randers_curvature"], jobs=jobs))

    for i, spec in enumerate(cfg["domains"]):
        domain = _domain_from_config(spec, dim)
        label = _domain_label(spec)
        records.append(check_r_flat(
            domain, cfg["samples"]["r_flat"], seed + 11 * i + 1,
            tol["r_flat"], f"r-flat-{label}",
            max_gauge=cfg["samples"]["max_gauge"], jobs=jobs))
        records.append(check_funk_pde(
            domain, cfg["samples"]["pde"], seed + 11 * i + 2,
            tol["funk_pde"], f"funk-pde-{label}",
            max_gauge=cfg["samples"]["max_gauge"], jobs=jobs))

    records.append(check_inverse_pde_grid(
        funk_closed, k0_ball, bases, tol["k0_inverse_pde"], "k0-inverse-pde",
        "the corrected metric solves the induced-spray equation "
        "F~_x = (F F~)_y"))
    records.append(check_positivity_grid(k0_ball, bases, "k0-positivity"))
    records.append(check_consistency(
        k0_generic, k0_ball, bases, tol["k0_consistency"], "k0-consistency",
        "the jet construction and the closed form of the corrected metric "
        "agree"))
    k0_gen0 = ZeroCurvatureMetric(funk_implicit, [0.0] * dim)
    records.append(check_consistency(
        k0_gen0, k0_origin, bases, tol["k0_consistency"],
        "k0-consistency-origin",
        "the jet construction over the implicit Funk solve matches the "
        "closed form at anchor 0"))

    records.append(check_series_match(cfg))
    records.append(check_series_pde_tail(cfg))

    records.append(check_rapcsak_grid(
        funk_closed, bases, tol["rapcsak"], "rapcsak-funk",
        expect_factor=lambda m, x, y: 0.5 * m.value(list(x), list(y))))
    records.append(check_rapcsak_grid(
        k0_ball, bases, tol["rapcsak"], "rapcsak-k0",
        expect_factor=lambda m, x, y: funk_closed.value(list(x), list(y))))

    sprays = [
        ("straightness-funk-spray", curv.funk_spray(funk_closed), ball),
        ("straightness-funk-metric", curv.MetricSpray(funk_closed), ball),
        ("straightness-hilbert", curv.MetricSpray(hilbert), ball),
        ("straightness-k0", curv.MetricSpray(k0_ball), ball),
        ("straightness-randers", curv.MetricSpray(randers), ball),
    ]
    ellipsoid_spec = next((d for d in cfg["domains"]
                           if d.get("kind") == "ellipsoid"), None)
    if ellipsoid_spec is not None:
        dom = _domain_from_config(ellipsoid_spec, dim)
        sprays.append(("straightness-funk-spray-ellipsoid",
                       curv.funk_spray(FunkMetric(dom, method="implicit")),
                       dom))
    for i, (name, spray, dom) in enumerate(sprays):
        records.append(check_straightness(spray, dom, cfg, seed + 101 * i,
                                          name, jobs=jobs))

    if cfg["checks"]["negative_control"]:
        fixture = SineWarpMetric(dim)
        rec = check_rapcsak_grid(fixture, bases[:5], tol["rapcsak"],
                                 "rapcsak-negative-control")
        rec.claim = ("deliberately warped norm fixture: the straight-geodesic "
                     "identity must fail here")
        rec.detail["expected_floor"] = tol["negative_control_floor"]
        rec.detail["fixture_failed_as_expected"] = (
            rec.max_residual >= tol["negative_control_floor"])
        records.append(rec)

    return VerificationReport(records)


# ---------------------------------------------------------------------------
# commands

def _write(path, text):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _fmt(value):
    return f"{value:.17g}"


def cmd_verify(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.tol is not None:
        for key in cfg["tolerances"]:
            if key.endswith("curvature"):
                cfg["tolerances"][key] = args.tol
    if args.jobs is not None:
        cfg["jobs"] = max(1, args.jobs)
    report = run_verify(cfg)
    for record in report.records:
        print(record.line())
    out = os.path.join(args.out, "report.json")
    _write(out, report.to_json() + "\n")
    print(f"report written to {out}")
    print(f"overall: {'pass' if report.passed else 'fail'}")
    return 0 if report.passed else 1


def cmd_curvature(args):
    cfg = load_config(args.config)
    if cfg["dim"] != 2:
        raise ConfigError("curvature grids are planar; use dim = 2 "
                          "(higher dimensions are exercised via the library)")
    if args.seed is not None:
        cfg["seed"] = args.seed
    spec = dict(cfg["metric"])
    if args.metric is not None:
        spec["kind"] = args.metric
    metric = metric_from_spec(spec, cfg)
    triples, _ = _grid_and_bases(cfg)
    n = cfg["dim"]
    header = ([f"x{i+1}" for i in range(n)] + [f"y{i+1}" for i in range(n)]
              + [f"u{i+1}" for i in range(n)] + ["K"])
    lines = [",".join(header)]
    for (x, y), us in _group_flags(triples).items():
        for s in curv.flag_curvatures(metric, list(x), list(y), us):
            row = ([_fmt(c) for c in s.x] + [_fmt(c) for c in s.y]
                   + [_fmt(c) for c in s.u] + [_fmt(s.value)])
            lines.append(",".join(row))
    path = os.path.join(args.out, f"curvature_{spec.get('kind')}.csv")
    _write(path, "\n".join(lines) + "\n")
    print(f"{len(lines) - 1} samples written to {path}")
    return 0


def _parse_vector(text, dim, label):
    try:
        vec = [float(c) for c in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"cannot parse {label} {text!r}") from exc
    if len(vec) != dim:
        raise ConfigError(f"{label} needs {dim} comma-separated components")
    return vec


def cmd_geodesic(args):
    cfg = load_config(args.config)
    dim = cfg["dim"]
    x0 = _parse_vector(args.x0, dim, "--x0")
    y0 = _parse_vector(args.y0, dim, "--y0")
    spec = dict(cfg["metric"])
    if args.metric is not None:
        spec["kind"] = args.metric
    metric = metric_from_spec(spec, cfg)
    if args.spray == "derived":
        spray = curv.funk_spray(metric)
    else:
        spray = curv.MetricSpray(metric)
    traj = geo.integrate(spray, x0, y0, args.t_end,
                         tol=cfg["geodesic"]["tol"], domain=metric.domain)
    path = os.path.join(args.out, "geodesic.csv")
    _write(path, geo.trajectory_csv(traj))
    summary = {
        "samples": len(traj),
        "accepted": traj.accepted,
        "rejected": traj.rejected,
        "max_error_estimate": traj.max_error_estimate,
        "stopped_early": traj.stopped_early,
        "reason": traj.reason,
        "straightness_residual": geo.straightness_residual(traj),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    print(f"trajectory written to {path}")
    return 0


def cmd_series(args):
    cfg = load_config(args.config)
    dim = cfg["dim"]
    x = _parse_vector(args.x, dim, "--x")
    y = _parse_vector(args.y, dim, "--y")
    orders = [int(v) for v in args.orders.split(",")]
    e = EuclideanNorm(dim)
    closed = ZeroCurvatureBallMetric([0.0] * dim, dim=dim).value(x, y)
    lines = ["M,partial_sum,tail,closed_form,abs_difference"]
    for m in orders:
        series = SeriesMetric(e, e, m)
        value, tail = series.value_with_tail(x, y)
        lines.append(",".join([str(m), _fmt(value), _fmt(tail), _fmt(closed),
                               _fmt(abs(value - closed))]))
    path = os.path.join(args.out, "series.csv")
    _write(path, "\n".join(lines) + "\n")
    print("\n".join(lines))
    print(f"table written to {path}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="finslerlab",
        description="Verification lab for projectively flat Finsler metrics")
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--tol", type=float,
                        help="override curvature tolerances")
    parser.add_argument("--jobs", type=int, help="worker processes")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("verify", help="run the claim verification matrix")

    p = sub.add_parser("curvature", help="flag-curvature table over the grid")
    p.add_argument("--metric", help="metric kind (overrides config)")

    p = sub.add_parser("geodesic", help="integrate one geodesic")
    p.add_argument("--x0", required=True, help="start point, comma-separated")
    p.add_argument("--y0", required=True, help="start velocity")
    p.add_argument("--t-end", type=float, default=1.2, dest="t_end")
    p.add_argument("--metric", help="metric kind (overrides config)")
    p.add_argument("--spray", choices=("metric", "derived"), default="metric",
                   help="metric-induced spray or the derived F y^i spray")

    p = sub.add_parser("series", help="partial-sum table of the series metric")
    p.add_argument("--orders", default="2,4,6,8,10,12",
                   help="comma-separated truncation orders")
    p.add_argument("--x", required=True, help="base point, comma-separated")
    p.add_argument("--y", required=True, help="direction, comma-separated")
    return parser


_COMMANDS = {
    "verify": cmd_verify,
    "curvature": cmd_curvature,
    "geodesic": cmd_geodesic,
    "series": cmd_series,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, MetricDomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
