"""Command-line driver: build solutions from a JSON config, sample them, verify them.

Usage::

    solitonforge <soliton|discrete|backlund|sigma2|verify|energy> --config cfg.json --out DIR

Every command writes ``solution.csv`` (or ``energy.csv``) plus ``report.json``
into ``DIR``.  Exit status is 0 when every check passes, 1 for usage or
config errors and 2 when a verification check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .fields import (
    ExplicitFields,
    SampleGrid,
    cnl_residual,
    map_points,
    plane_wave_sum,
    scnl_relative_residual,
    scnl_residual,
    vacuum,
)
from .laxpair import VacuumG, zero_curvature_residual
from .numkit import JetZeroDivision
from .sigma2 import (
    Sigma2ParameterError,
    Sigma2Spec,
    admissible_nu,
    backlund_constraint_scan,
    from_sigma2,
    resolve_convention,
    s2_relative_residual,
    s2_residual,
    schl1_relative_residual,
    schl1_residual,
    sigma2_nsoliton,
    triangular_gauge_state,
)
from .soliton_engine import (
    ChainDressedFields,
    DirectDressedFields,
    DressingSingularity,
    SolitonSpec,
    nsoliton,
)
from .transforms import (
    LadderSingularity,
    SubstitutedFields,
    appendix_residuals,
    energy,
    one_soliton_energy,
)

COMMANDS = ("soliton", "discrete", "backlund", "sigma2", "verify", "energy")
DEFAULT_TOLERANCES = {"residual": 1e-8, "invariant": 1e-10}
CSV_COLUMNS = ["x", "t", "re_u", "im_u", "re_v", "im_v"]
_SINGULAR = (DressingSingularity, LadderSingularity, JetZeroDivision, ZeroDivisionError)
_PROBE_LAMBDA = 0.37 + 0.21j


class ConfigError(ValueError):
    pass


# -- config parsing ---------------------------------------------------------------

def parse_complex(v, what="value"):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(p, (int, float)) for p in v):
        return complex(v[0], v[1])
    raise ConfigError(f"{what} must be a number or an [re, im] pair, got {v!r}")


def _req(cfg, key, where="config"):
    if key not in cfg:
        raise ConfigError(f"{where} is missing {key!r}")
    return cfg[key]


@dataclass
class RunConfig:
    command: str
    params: dict
    grid: SampleGrid
    tolerances: dict
    ox: int = 2
    ot: int = 1
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, command, cfg):
        if not isinstance(cfg, dict):
            raise ConfigError("config must be a JSON object")
        g = _req(cfg, "grid")
        try:
            grid = SampleGrid(float(g["x_min"]), float(g["x_max"]), int(g["nx"]),
                              float(g["t_min"]), float(g["t_max"]), int(g["nt"]))
        except KeyError as exc:
            raise ConfigError(f"grid is missing {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad grid: {exc}") from None
        tol = dict(DEFAULT_TOLERANCES)
        tol.update(cfg.get("tolerances", {}))
        for k, v in tol.items():
            if not isinstance(v, (int, float)) or not v > 0:
                raise ConfigError(f"tolerance {k!r} must be positive")
        jo = cfg.get("jet_orders", {})
        ox, ot = int(jo.get("ox", 2)), int(jo.get("ot", 1))
        if ox < 2 or ot < 1:
            raise ConfigError("jet_orders need ox >= 2 and ot >= 1")
        return cls(command, cfg, grid, {k: float(v) for k, v in tol.items()}, ox, ot, cfg)


def load_config(path, command):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return RunConfig.from_dict(command, cfg)


def soliton_spec_from(cfg):
    sol = cfg.get("solitons")
    if not isinstance(sol, list) or not sol:
        raise ConfigError("'solitons' must be a nonempty list")
    pairs, partners = [], []
    for i, s in enumerate(sol):
        lam = parse_complex(_req(s, "lambda", f"solitons[{i}]"), "lambda")
        alpha = parse_complex(s.get("alpha", 1.0), "alpha")
        pairs.append((lam, alpha))
        if "lambda2" in s:
            partners.append((parse_complex(s["lambda2"], "lambda2"),
                             parse_complex(_req(s, "alpha2", f"solitons[{i}]"), "alpha2")))
    enforce = not partners
    if partners and len(partners) != len(pairs):
        raise ConfigError("either every soliton has an explicit partner or none does")
    try:
        return SolitonSpec(tuple(pairs), enforce, tuple(partners) if partners else None)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def seed_from(cfg):
    seed = cfg.get("seed", {"kind": "vacuum"})
    kind = seed.get("kind", "vacuum")
    if kind == "vacuum":
        return vacuum(), {"kind": "vacuum"}
    if kind == "plane_waves":
        comp = seed.get("component", "v")
        if comp not in ("u", "v"):
            raise ConfigError("seed component must be 'u' or 'v'")
        waves = seed.get("waves")
        if not isinstance(waves, list) or not waves:
            raise ConfigError("plane_waves seed needs a nonempty 'waves' list")
        terms = [(parse_complex(_req(w, "c", "wave"), "c"), parse_complex(_req(w, "k", "wave"), "k"))
                 for w in waves]
        return plane_wave_sum(terms, comp), {"kind": kind, "component": comp}
    raise ConfigError(f"unknown seed kind {kind!r}")


# -- reports ------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    max_defect: float
    tolerance: float
    location: list | None = None

    @property
    def passed(self):
        return bool(math.isfinite(self.max_defect) and self.max_defect <= self.tolerance)

    def as_dict(self):
        return {"name": self.name, "max_defect": _num(self.max_defect), "tolerance": self.tolerance,
                "pass": self.passed, "location": self.location}


@dataclass
class VerificationReport:
    command: str
    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def add(self, name, defects, tolerance, points=None):
        """Record the max of ``defects`` (NaN entries skipped) and where it occurred."""
        arr = np.asarray(defects, dtype=float).ravel()
        known = ~np.isnan(arr)
        if not known.any():
            self.checks.append(Check(name, float("nan"), tolerance))
            return self.checks[-1]
        i = int(np.argmax(np.where(known, arr, -np.inf)))
        loc = list(points[i]) if points is not None else None
        self.checks.append(Check(name, float(arr[i]), tolerance, loc))
        return self.checks[-1]

    def as_dict(self):
        return {
            "command": self.command,
            "version": __version__,
            "pass": self.passed,
            "tolerances": self.tolerances,
            "checks": [c.as_dict() for c in self.checks],
            "metadata": self.metadata,
        }

    def to_json(self):
        return json.dumps(_jsonable(self.as_dict()), sort_keys=True, indent=2) + "\n"


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [_num(obj.real), _num(obj.imag)]
    if isinstance(obj, (np.floating, float)):
        return _num(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


# -- output -------------------------------------------------------------------------

def atomic_write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    v = float(v)
    return "nan" if math.isnan(v) else format(v, ".17g")


def solution_csv(points, U, V):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for (x, t), u, v in zip(points, U, V):
        w.writerow([_fmt(x), _fmt(t), _fmt(u.real), _fmt(u.imag), _fmt(v.real), _fmt(v.imag)])
    return buf.getvalue()


def read_solution_csv(path):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read solution file: {exc}") from None
    if not rows or rows[0] != CSV_COLUMNS:
        raise ConfigError(f"solution file header must be {','.join(CSV_COLUMNS)}")
    pts, U, V = [], [], []
    for n, r in enumerate(rows[1:], start=2):
        if len(r) != 6:
            raise ConfigError(f"line {n}: expected 6 columns")
        try:
            x, t, ur, ui, vr, vi = map(float, r)
        except ValueError:
            raise ConfigError(f"line {n}: unparsable number") from None
        pts.append((x, t))
        U.append(complex(ur, ui))
        V.append(complex(vr, vi))
    return pts, np.array(U), np.array(V)


def _write_outputs(out, name, csv_text, report, model):
    out = Path(out)
    atomic_write(out / name, csv_text)
    meta = {"model": model, "csv": name, "version": __version__}
    atomic_write(out / (Path(name).stem + ".meta.json"), json.dumps(_jsonable(meta), sort_keys=True, indent=2) + "\n")
    atomic_write(out / "report.json", report.to_json())


# -- evaluation helpers ------------------------------------------------------------------

def _sample(fields, points):
    def one(p):
        try:
            return fields.values(*p)
        except _SINGULAR:
            return (complex("nan"), complex("nan"))

    vals = np.array(map_points(one, points), dtype=complex)
    return vals[:, 0], vals[:, 1]


def _pointwise(fn, points):
    def one(p):
        try:
            return float(fn(p))
        except _SINGULAR:
            return float("nan")

    return np.array(map_points(one, points))


def _singular_points(U, points):
    return [list(points[i]) for i in np.flatnonzero(np.isnan(U))]


def _pde_checks(report, fields, points, tol, cnl=True):
    report.add("scnl_residual", _pointwise(lambda p: max(map(abs, scnl_residual(fields, *p))), points),
               tol["residual"], points)
    if cnl:
        report.add("cnl_residual", _pointwise(lambda p: abs(cnl_residual(fields, *p)), points),
                   tol["residual"], points)
    report.add("zero_curvature", _pointwise(
        lambda p: np.abs(zero_curvature_residual(fields, _PROBE_LAMBDA, p)).max(), points),
        tol["residual"], points)


# -- models: what a sidecar records and verify rebuilds ----------------------------------------

def _spec_model(spec):
    steps = [{"lambda": l1, "alpha": a1, "lambda2": l2, "alpha2": a2} for l1, a1, l2, a2 in spec.steps()]
    return {"kind": "dressing", "steps": steps, "sigma1": spec.enforce_sigma1}


def build_model(model):
    """Fields described by a sidecar ``model`` block."""
    kind = model.get("kind")
    if kind == "vacuum":
        return vacuum()
    if kind == "dressing":
        steps = model["steps"]
        pairs = [(parse_complex(s["lambda"]), parse_complex(s["alpha"])) for s in steps]
        if model.get("sigma1", True):
            return nsoliton(SolitonSpec(tuple(pairs)))
        partners = [(parse_complex(s["lambda2"]), parse_complex(s["alpha2"])) for s in steps]
        return nsoliton(SolitonSpec(tuple(pairs), False, tuple(partners)))
    if kind == "chain":
        steps = [tuple(parse_complex(s[k]) for k in ("lambda", "alpha", "lambda2", "alpha2"))
                 for s in model["steps"]]
        return ChainDressedFields(vacuum(), VacuumG(), steps)
    if kind == "discrete":
        seed, _ = seed_from({"seed": model["seed"]})
        return SubstitutedFields(seed, int(model["steps"]))
    if kind == "sigma2":
        spec = Sigma2Spec([parse_complex(v) for v in model["lambdas"]],
                          [parse_complex(v) for v in model["cs"]], model["convention"])
        return from_sigma2(sigma2_nsoliton(spec))
    raise ConfigError(f"unknown model kind {kind!r}")


def _model_seed_block(cfg):
    seed = cfg.get("seed", {"kind": "vacuum"})
    return json.loads(json.dumps(seed))


# -- commands -------------------------------------------------------------------------------

def cmd_soliton(rc, out):
    spec = soliton_spec_from(rc.params)
    fields = nsoliton(spec)
    pts = list(rc.grid.points())
    U, V = _sample(fields, pts)
    tol = rc.tolerances
    report = VerificationReport("soliton", tolerances=tol)
    _pde_checks(report, fields, pts, tol)
    report.add("sigma1_reality", np.abs(U - np.conj(V)), tol["invariant"], pts)
    report.metadata = {
        "n": spec.n,
        "sigma1_enforced": spec.enforce_sigma1,
        "singular_points": _singular_points(U, pts),
        "grid": rc.params["grid"],
        "jet_orders": {"ox": rc.ox, "ot": rc.ot},
    }
    _write_outputs(out, "solution.csv", solution_csv(pts, U, V), report, _spec_model(spec))
    return report


def cmd_discrete(rc, out):
    seed, seed_meta = seed_from(rc.params)
    steps = int(rc.params.get("steps", 1))
    if steps == 0:
        raise ConfigError("'steps' must be nonzero")
    fields = SubstitutedFields(seed, steps)
    # the last step undone must give the previous rung back
    prev = SubstitutedFields(seed, steps - 1 if steps > 0 else steps + 1)
    back = SubstitutedFields(fields, -1 if steps > 0 else 1)
    pts = list(rc.grid.points())
    U, V = _sample(fields, pts)
    u0, v0 = _sample(prev, pts)
    ub, vb = _sample(back, pts)
    tol = rc.tolerances
    report = VerificationReport("discrete", tolerances=tol)
    scale = max(1.0, float(np.nanmax(np.abs(np.concatenate([u0, v0])))))
    report.add("roundtrip", np.maximum(np.abs(ub - u0), np.abs(vb - v0)) / scale, tol["invariant"], pts)
    report.add("scnl_residual", _pointwise(lambda p: max(map(abs, scnl_residual(fields, *p))), pts),
               tol["residual"], pts)
    report.metadata = {"steps": steps, "seed": seed_meta, "singular_points": _singular_points(U, pts)}
    model = {"kind": "discrete", "seed": _model_seed_block(rc.params), "steps": steps}
    _write_outputs(out, "solution.csv", solution_csv(pts, U, V), report, model)
    return report


def cmd_backlund(rc, out):
    spec = soliton_spec_from(rc.params)
    order = rc.params.get("order", list(range(spec.n)))
    if sorted(order) != list(range(spec.n)):
        raise ConfigError("'order' must be a permutation of the soliton indices")
    steps = [spec.steps()[i] for i in order]
    chain = ChainDressedFields(vacuum(), VacuumG(), steps)
    direct = DirectDressedFields(spec)
    pts = list(rc.grid.points())
    U, V = _sample(chain, pts)
    Ud, Vd = _sample(direct, pts)
    tol = rc.tolerances
    scale = max(float(np.nanmax(np.abs(Ud))), 1e-300) if np.isfinite(Ud).any() else 1.0
    report = VerificationReport("backlund", tolerances=tol)
    report.add("chain_vs_direct",
               np.maximum(np.abs(U - Ud), np.abs(V - Vd)) / scale, tol["residual"], pts)
    _pde_checks(report, chain, pts, tol, cnl=spec.enforce_sigma1)
    meta = {"order": order, "singular_points": _singular_points(U, pts)}
    if spec.n == 1:
        l1, a1, l2, a2 = spec.steps()[0]
        app = appendix_residuals(vacuum(), VacuumG(), l1, a1, rc.grid, l2, a2)
        report.add("appendix_bc_system", [app.system_residual], 1e-6)
        report.add("appendix_reconstruction", [app.reconstruction_defect], 1e-6)
        report.add("trace_spread", [app.trace_spread], tol["invariant"])
        report.add("det_spread", [app.det_spread], tol["invariant"])
        report.add("det_vs_roots", [app.det_vs_roots], tol["invariant"])
        meta["appendix"] = {"branch_map": app.branch_map,
                            "printed_system_residual": app.printed_system_residual,
                            "degenerate_points": app.degenerate_points}
    report.metadata = meta
    model = {"kind": "chain", "steps": [
        {"lambda": l1, "alpha": a1, "lambda2": l2, "alpha2": a2} for l1, a1, l2, a2 in steps]}
    _write_outputs(out, "solution.csv", solution_csv(pts, U, V), report, model)
    return report


def sigma2_spec_from(cfg, convention):
    lams = [parse_complex(v, "lambda") for v in _req(cfg, "lambdas")]
    if not lams:
        raise ConfigError("'lambdas' must be nonempty")
    try:
        if "cs" in cfg:
            return Sigma2Spec(lams, [parse_complex(v, "c") for v in cfg["cs"]], convention)
        return Sigma2Spec.admissible(lams, cfg.get("phases"), cfg.get("pair_scale"), convention)
    except Sigma2ParameterError as exc:
        raise ConfigError(str(exc)) from None


def cmd_sigma2(rc, out):
    conv = rc.params.get("convention", "auto")
    conv_report = None
    if conv == "auto":
        conv_report = resolve_convention(tol=rc.tolerances["residual"])
        conv = conv_report.flag
    spec = sigma2_spec_from(rc.params, conv)
    sol = sigma2_nsoliton(spec)
    fields = from_sigma2(sol)
    pts = list(rc.grid.points())
    U, V = _sample(fields, pts)
    tol = rc.tolerances

    def jets(p):
        return sol.jets(*p, 5, 2)

    def schl1_abs(p):
        th, R = jets(p)
        return max(map(abs, schl1_residual((th, R), p)))

    # near poles of the solution the terms are large; gate on term-relative residuals
    report = VerificationReport("sigma2", tolerances=tol)
    report.add("schl1_relative_residual", _pointwise(lambda p: schl1_relative_residual(*jets(p)), pts),
               tol["residual"], pts)
    report.add("s2_relative_residual", _pointwise(lambda p: s2_relative_residual(jets(p)[0]), pts),
               tol["residual"], pts)
    report.add("scnl_relative_residual", _pointwise(lambda p: scnl_relative_residual(fields, *p), pts),
               tol["residual"], pts)
    report.add("unimodular_v", np.abs(np.abs(V) - 1), tol["residual"], pts)
    absolute = {
        "schl1": _pointwise(schl1_abs, pts),
        "s2": _pointwise(lambda p: abs(s2_residual(jets(p)[0])), pts),
        "scnl": _pointwise(lambda p: max(map(abs, scnl_residual(fields, *p))), pts),
    }
    meta = {"convention": conv, "n": spec.n, "singular_points": _singular_points(U, pts),
            "absolute_residual_max": {k: float(np.nanmax(v)) for k, v in absolute.items()}}
    if conv_report is not None:
        meta["convention_residuals"] = conv_report.residuals
    bc = rc.params.get("backlund")
    if bc is not None:
        meta["backlund"] = _sigma2_backlund(report, bc, pts, tol)
    report.metadata = meta
    model = {"kind": "sigma2", "lambdas": spec.lambdas, "cs": spec.cs, "convention": conv}
    _write_outputs(out, "solution.csv", solution_csv(pts, U, V), report, model)
    return report


def _sigma2_backlund(report, bc, pts, tol):
    lam0 = float(_req(bc, "lambda0", "backlund"))
    l1 = parse_complex(_req(bc, "lambda1", "backlund"))
    l2 = parse_complex(_req(bc, "lambda2", "backlund"))
    if "nu1" in bc and "nu2" in bc:
        n1, n2 = parse_complex(bc["nu1"]), parse_complex(bc["nu2"])
    else:
        origin = (0.0, 0.0)
        s1 = triangular_gauge_state(l1, lam0, 0.0, origin)
        if l1.imag == 0 and l2.imag == 0:
            n1 = admissible_nu(s1, phase=float(bc.get("phase1", 0.0)))
            n2 = admissible_nu(triangular_gauge_state(l2, lam0, 0.0, origin),
                               phase=float(bc.get("phase2", 0.0)))
        else:
            n1 = parse_complex(bc.get("nu1", 1.0))
            s1 = triangular_gauge_state(l1, lam0, n1, origin)
            n2 = admissible_nu(s1, triangular_gauge_state(l2, lam0, 0.0, origin))
    reps = backlund_constraint_scan(l1, n1, l2, n2, lam0, pts)
    for name in ("cc_defect", "vic_defect", "extra_defect"):
        report.add(f"backlund_{name}", [float("nan") if r is None else getattr(r, name) for r in reps],
                   tol["residual"], pts)
    good = [r for r in reps if r is not None]
    return {"nu1": n1, "nu2": n2, "branch": good[0].branch if good else None,
            "singular_points": [list(p) for p, r in zip(pts, reps) if r is None]}


def cmd_energy(rc, out):
    spec = soliton_spec_from(rc.params)
    fields = nsoliton(spec)
    xs, ts = rc.grid.xs, rc.grid.ts
    refs = [one_soliton_energy(lam, xs, 0.0, alpha) for lam, alpha in spec.pairs]
    total = float(sum(refs))
    rows, raws, bmax = [], [], []
    for t in ts:
        psi = [fields.values(float(x), float(t))[0] for x in xs]
        e = energy(psi, xs)
        raws.append(e.raw)
        bmax.append(e.boundary_max)
        rows.append((float(t), e.raw, spec.n * e.raw / total))
    raws = np.array(raws)
    tol = rc.tolerances
    report = VerificationReport("energy", tolerances=tol)
    etol = float(rc.params.get("energy_tolerance", 1e-4))
    report.tolerances = dict(tol, energy=etol)
    report.add("energy_conservation", [float(np.ptp(raws) / abs(raws.mean()))], etol)
    report.add("boundary_decay", bmax, float(rc.params.get("decay_tolerance", 1e-6)),
               [(float(xs[0]), float(t)) for t in ts])
    if rc.params.get("check_additivity", False):
        atol = float(rc.params.get("additivity_tolerance", 1e-3))
        report.add("energy_additivity", np.abs(raws - total) / total, atol,
                   [(0.0, float(t)) for t in ts])
    report.metadata = {"one_soliton_energies": refs, "n": spec.n}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "raw_energy", "normalized_energy"])
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    out = Path(out)
    atomic_write(out / "energy.csv", buf.getvalue())
    atomic_write(out / "report.json", report.to_json())
    return report


def cmd_verify(rc, out):
    """Check a solution file against the model recorded in its sidecar (or in the config)."""
    path = Path(_req(rc.params, "input"))
    pts, U, V = read_solution_csv(path)
    model = rc.params.get("model")
    if model is None:
        meta_path = path.with_name(path.stem + ".meta.json")
        try:
            model = json.loads(meta_path.read_text())["model"]
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            raise ConfigError(f"no model in config and unusable sidecar {meta_path.name}: {exc}") from None
    grid_pts = [(float(x), float(t)) for x, t in rc.grid.points()]
    if len(grid_pts) != len(pts) or any(
            abs(a[0] - b[0]) > 1e-12 * max(1, abs(a[0])) or abs(a[1] - b[1]) > 1e-12 * max(1, abs(a[1]))
            for a, b in zip(grid_pts, pts)):
        raise ConfigError("solution file points do not match the configured grid")
    try:
        fields = build_model(model)
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad model block: {exc}") from None
    Um, Vm = _sample(fields, pts)
    tol = rc.tolerances
    scale = max(1.0, float(np.nanmax(np.abs(np.concatenate([Um, Vm])))) if np.isfinite(Um).any() else 1.0)
    report = VerificationReport("verify", tolerances=tol)
    both_nan = np.isnan(U) & np.isnan(Um)
    dev = np.maximum(np.abs(U - Um), np.abs(V - Vm)) / scale
    dev = np.where(both_nan, 0.0, np.where(np.isnan(dev), np.inf, dev))
    report.add("sample_vs_model", dev, tol["residual"], pts)
    sigma1 = model.get("kind") in ("dressing", "chain") and model.get("sigma1", True) and all(
        parse_complex(s["lambda2"]) == parse_complex(s["lambda"]).conjugate() for s in model.get("steps", []))
    _pde_checks(report, fields, pts, tol, cnl=sigma1 or model.get("kind") == "vacuum")
    report.metadata = {"input": path.name, "model": model}
    atomic_write(Path(out) / "report.json", report.to_json())
    return report


HANDLERS = {
    "soliton": cmd_soliton,
    "discrete": cmd_discrete,
    "backlund": cmd_backlund,
    "sigma2": cmd_sigma2,
    "verify": cmd_verify,
    "energy": cmd_energy,
}


def build_parser():
    p = argparse.ArgumentParser(prog="solitonforge", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--version", action="version", version=__version__)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        rc = load_config(args.config, args.command)
        report = HANDLERS[args.command](rc, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.max_defect:.3e} (tol {c.tolerance:.1e})")
    return 0 if report.passed else 2


if __name__ == "__main__":
    sys.exit(main())
