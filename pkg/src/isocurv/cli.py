"""Command line front end.

``isocurv run --config cfg.json --out DIR`` runs the checks of a JSON
configuration and writes ``report.json`` plus CSV tables;
``isocurv corpus [suite]`` runs the curated oracle suites.

Exit codes: 0 all non-vacuous checks pass, 1 a check failed, 2 invalid
configuration, 3 numerical rejection (cusp, atom on the boundary, ...).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np

from . import corpus as corpus_mod
from .curvature import CurvatureDecomposition, gauss_bonnet_two_chart
from .domain import Circle, PlanarDomain, Polygon
from .errors import DomainError, NumericalRejection
from .iso import (
    alexandrov_check,
    alexandrov_regular_check,
    bol_check,
    fit_sharp_metric,
    huber_check,
    huber_regular_check,
)
from .measure import SignedAtomicMeasure
from .metric import PRESETS, Flat, HarmonicPolynomial, Metric, Potential, decompose, spherical_cone
from .quad import classify_growth, dyadic_radii, lp_probe
from .rearrange import distribution, rearrangement, solve_radial_liouville, verify_chain
from .sweep import run_sweep

log = logging.getLogger("isocurv")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_REJECT = 0, 1, 2, 3

_point = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_circle = {
    "type": "object",
    "properties": {"kind": {"const": "circle"}, "center": _point, "radius": {"type": "number", "exclusiveMinimum": 0}},
    "required": ["kind", "radius"],
    "additionalProperties": False,
}
_polygon = {
    "type": "object",
    "properties": {"kind": {"const": "polygon"}, "vertices": {"type": "array", "items": _point, "minItems": 3}},
    "required": ["kind", "vertices"],
    "additionalProperties": False,
}
_domain = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["disk", "polygon"]},
        "center": _point,
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "vertices": {"type": "array", "items": _point, "minItems": 3},
        "holes": {"type": "array", "items": {"oneOf": [_circle, _polygon]}},
    },
    "required": ["kind"],
    "allOf": [
        {"if": {"properties": {"kind": {"const": "disk"}}}, "then": {"required": ["radius"]}},
        {"if": {"properties": {"kind": {"const": "polygon"}}}, "then": {"required": ["vertices"]}},
    ],
    "additionalProperties": False,
}
_metric = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["preset", "cone", "potential", "flat"]},
        "name": {"enum": sorted(PRESETS)},
        "params": {"type": "object", "additionalProperties": {"type": "number"}},
        "K0": {"type": "number", "minimum": 0},
        "alpha": {"type": "number", "exclusiveMaximum": 1},
        "tau0": {"type": "number"},
        "atoms": {"type": "array", "items": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}},
        "harmonic": {"type": "array", "items": _point},
    },
    "required": ["kind"],
    "allOf": [
        {"if": {"properties": {"kind": {"const": "preset"}}}, "then": {"required": ["name"]}},
        {"if": {"properties": {"kind": {"const": "cone"}}}, "then": {"required": ["K0", "alpha", "tau0"]}},
    ],
    "additionalProperties": False,
}
CHECK_KINDS = [
    "huber", "huber_regular", "alexandrov", "alexandrov_regular", "bol", "sharp_fit",
    "rearrange", "gauss_bonnet", "decompose", "lp_probe", "sweep",
]
_nonneg = {"type": "number", "minimum": 0}
_check = {
    "type": "object",
    "properties": {
        "kind": {"enum": CHECK_KINDS},
        "K0": _nonneg,
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "rtol": {"type": "number", "exclusiveMinimum": 0},
        "E": _domain,
        "r0": {"type": "number", "exclusiveMinimum": 1},
        "alpha": {"type": "number", "exclusiveMaximum": 1},
        "C": {"type": "number", "exclusiveMinimum": 0},
        "n": {"type": "integer", "minimum": 5},
        "scale": {"type": "number", "exclusiveMinimum": 0},
        "gamma": {"type": "number"},
        "p": {"type": "number", "minimum": 1},
        "kmax": {"type": "integer", "minimum": 2, "maximum": 60},
        "r_outer": {"type": "number", "exclusiveMinimum": 0},
        "center": _point,
        "density": {"enum": ["K", "factor"]},
        "expect": {"enum": ["bounded", "divergent", "sharp", "not_sharp"]},
        "check": {"enum": ["alexandrov", "huber"]},
        "points": {"type": "array", "items": _point},
    },
    "required": ["kind"],
    "allOf": [
        {"if": {"properties": {"kind": {"enum": ["alexandrov", "alexandrov_regular", "sharp_fit"]}}},
         "then": {"required": ["K0"]}},
        {"if": {"properties": {"kind": {"const": "huber_regular"}}}, "then": {"required": ["E"]}},
        {"if": {"properties": {"kind": {"const": "rearrange"}}}, "then": {"required": ["K0", "alpha", "C"]}},
        {"if": {"properties": {"kind": {"const": "lp_probe"}}}, "then": {"required": ["p"]}},
    ],
    "additionalProperties": False,
}
CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "metric": _metric,
        "domain": _domain,
        "checks": {"type": "array", "items": _check, "minItems": 1},
        "output": {"type": "object", "properties": {"dir": {"type": "string"}, "report": {"type": "string"}},
                   "additionalProperties": False},
    },
    "required": ["checks"],
    "additionalProperties": False,
}
NEEDS_METRIC = {"huber", "huber_regular", "alexandrov", "alexandrov_regular", "bol", "sharp_fit", "gauss_bonnet",
                "decompose", "lp_probe"}
NEEDS_DOMAIN = {"huber", "huber_regular", "alexandrov", "alexandrov_regular", "bol", "sharp_fit"}


class ConfigError(ValueError):
    pass


def validate_config(cfg: dict) -> None:
    """Raise :class:`ConfigError` naming the offending location."""
    v = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(v.iter_errors(cfg), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        loc = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigError(f"config invalid at {loc}: {e.message}")
    for i, chk in enumerate(cfg["checks"]):
        if chk["kind"] in NEEDS_METRIC and "metric" not in cfg:
            raise ConfigError(f"config invalid at checks/{i}: check {chk['kind']!r} needs a metric block")
        if chk["kind"] in NEEDS_DOMAIN and "domain" not in cfg:
            raise ConfigError(f"config invalid at checks/{i}: check {chk['kind']!r} needs a domain block")


def _c(p) -> complex:
    return complex(p[0], p[1])


def _curve(block: dict):
    if block["kind"] in ("circle", "disk"):
        return Circle(_c(block.get("center", [0, 0])), float(block["radius"]))
    return Polygon(np.asarray(block["vertices"], dtype=float))


def build_domain(block: dict) -> PlanarDomain:
    return PlanarDomain(_curve(block), tuple(_curve(h) for h in block.get("holes", [])))


def build_metric(block: dict) -> Metric:
    kind = block["kind"]
    if kind == "preset":
        return PRESETS[block["name"]](**block.get("params", {}))
    if kind == "cone":
        return spherical_cone(block["K0"], block["alpha"], block["tau0"])
    if kind == "flat":
        return Flat()
    atoms = SignedAtomicMeasure.from_pairs((complex(x, y), w) for x, y, w in block.get("atoms", []))
    coeffs = [complex(a, b) for a, b in block.get("harmonic", [])]
    h = HarmonicPolynomial.from_complex(coeffs) if coeffs else HarmonicPolynomial.zero()
    return Potential(h, atoms)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if np.isfinite(x) else str(x)
    return x


def _write_csv(path: Path, header, columns) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([repr(float(v)) for v in row])


def run_check(cfg: dict, index: int, out: Optional[str], tol: float, seed: int, cases: int, parallel: int) -> dict:
    """Execute one check; returns a record with ``status`` in pass/fail/vacuous/rejected."""
    chk = cfg["checks"][index]
    kind = chk["kind"]
    t = chk.get("tol", tol)
    rec = {"index": index, "kind": kind}
    try:
        g = build_metric(cfg["metric"]) if "metric" in cfg else None
        E = build_domain(cfg["domain"]) if "domain" in cfg else None
        rtol = chk.get("rtol", 1e-10)
        if kind in ("huber", "huber_regular", "alexandrov", "alexandrov_regular", "bol"):
            if kind == "huber":
                rep = huber_check(g, E, t, rtol)
            elif kind == "huber_regular":
                rep = huber_regular_check(g, E, build_domain(chk["E"]), t, rtol)
            else:
                c = CurvatureDecomposition.from_metric(g)
                if kind == "alexandrov":
                    rep = alexandrov_check(g, c, E, chk["K0"], t, rtol)
                elif kind == "alexandrov_regular":
                    rep = alexandrov_regular_check(g, c, E, chk["K0"], t, rtol)
                else:
                    rep = bol_check(g, c, E, t)
            rec["result"] = rep.to_dict()
            rec["status"] = "vacuous" if rep.vacuous and rep.passed else ("pass" if rep.passed else "fail")
        elif kind == "sharp_fit":
            fit = fit_sharp_metric(g, CurvatureDecomposition.from_metric(g), E, chk["K0"], tol=t)
            rec["result"] = fit.to_dict()
            want = chk.get("expect", "sharp") == "sharp"
            rec["status"] = "pass" if fit.sharp == want else "fail"
        elif kind == "gauss_bonnet":
            gb = gauss_bonnet_two_chart(g, r0=chk.get("r0", 4.0))
            rec["result"] = gb.to_dict()
            ok = abs(gb.total - 4 * np.pi) <= t * 4 * np.pi + gb.error_estimate
            rec["status"] = "pass" if ok else "fail"
        elif kind == "decompose":
            dec = decompose(g)
            pts = np.array([_c(p) for p in chk.get("points", [])], dtype=complex)
            rec["result"] = {
                "f_atoms": [[a.point, a.weight] for a in dec.f_atoms],
                "k_s": [[a.point, a.weight] for a in dec.k_s()],
                "harmonic": dec.f_harmonic.coeffs,
                "points": pts,
                "K": np.asarray(dec.K(pts), dtype=float) if pts.size else [],
                "u": np.asarray(dec.u(pts), dtype=float) if pts.size else [],
                "metric": g.describe(),
            }
            rec["status"] = "pass"
        elif kind == "lp_probe":
            density = g.curvature if chk.get("density", "K") == "K" else g.factor
            radii = dyadic_radii(chk.get("r_outer", 1.0), chk.get("kmax", 20))
            vals = lp_probe(density, _c(chk.get("center", [0, 0])), chk["p"], radii)
            verdict = classify_growth(vals)
            rec["result"] = {"radii": radii, "values": vals, **verdict}
            expect = chk.get("expect")
            rec["status"] = "pass" if expect is None or verdict["verdict"] == expect else "fail"
        elif kind == "rearrange":
            p = solve_radial_liouville(chk["K0"], chk["alpha"], chk["C"])
            if "scale" in chk:
                p = p.scaled(chk["scale"])
            d = rearrangement(p, n=chk.get("n", 2001), gamma=chk.get("gamma"))
            v = verify_chain(d, t)
            rec["result"] = {
                "t_plus": p.t_plus, "mu0": d.mu0, "M": d.M, "L2": d.L2, "gamma": d.gamma,
                "F_final": d.F[-1], "P_plus_change": d.P_plus[-1] - d.P_plus[0], "verdict": v.to_dict(),
                "diagnostics": p.diagnostics,
            }
            if out:
                base = Path(out)
                f1, f2 = base / f"rearrange_{index}.csv", base / f"distribution_{index}.csv"
                _write_csv(f1, ["s", "eta_star", "F", "P_plus"], d.table().T)
                tg = np.linspace(0.0, p.t_plus, 501)
                _write_csv(f2, ["t", "mu"], [tg, distribution(p, tg)])
                rec["files"] = [str(f1), str(f2)]
            rec["status"] = "pass" if v.passed else "fail"
        elif kind == "sweep":
            res = run_sweep(chk.get("check", "alexandrov"), cases, seed, t, chk.get("rtol", 1e-9), parallel)
            rec["result"] = res
            rec["status"] = "pass" if res["failures"] == 0 else "fail"
    except NumericalRejection as exc:
        rec["status"] = "rejected"
        rec["diagnostic"] = f"{type(exc).__name__}: {exc}"
    except (DomainError, ValueError, TypeError) as exc:
        rec["status"] = "config_error"
        rec["diagnostic"] = f"checks/{index}: {type(exc).__name__}: {exc}"
    return _jsonable(rec)


def _run_one(args):
    return run_check(*args)


def run(cfg: dict, out: Optional[str] = None, tol: float = 1e-6, seed: int = 42, cases: int = 200,
        parallel: int = 1) -> tuple[dict, int]:
    """Validate and execute a configuration; returns ``(report, exit code)``."""
    try:
        validate_config(cfg)
    except ConfigError as exc:
        return {"status": "config_error", "diagnostic": str(exc), "seed": seed}, EXIT_CONFIG
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
    jobs = [(cfg, i, out, tol, seed, cases, 1 if parallel > 1 else parallel) for i in range(len(cfg["checks"]))]
    if parallel > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(parallel) as ex:
            records = list(ex.map(_run_one, jobs))  # map keeps config order
    else:
        records = [_run_one(j) for j in jobs]
    statuses = [r["status"] for r in records]
    if "config_error" in statuses:
        code = EXIT_CONFIG
    elif "rejected" in statuses:
        code = EXIT_REJECT
    elif "fail" in statuses:
        code = EXIT_FAIL
    else:
        code = EXIT_OK
    report = {
        "status": {0: "pass", 1: "fail", 2: "config_error", 3: "rejected"}[code],
        "exit_code": code,
        "seed": seed,
        "cases": cases,
        "tol": tol,
        "config": cfg,
        "checks": records,
        "vacuous": [r["index"] for r in records if r["status"] == "vacuous"],
    }
    return _jsonable(report), code


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    output = cfg.get("output", {}) if isinstance(cfg, dict) else {}
    out = args.out or output.get("dir")
    name = output.get("report", "report.json")
    report, code = run(cfg, out, args.tol, args.seed, args.cases, args.parallel)
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        with open(Path(out) / name, "w") as fh:
            json.dump(report, fh, indent=2)
    for r in report.get("checks", []):
        line = f"[{r['index']}] {r['kind']:<20} {r['status']}"
        if "diagnostic" in r:
            line += f"  {r['diagnostic']}"
        print(line)
    if "diagnostic" in report:
        print(report["diagnostic"], file=sys.stderr)
    print(f"status: {report['status']} (exit {code})")
    return code


def _cmd_corpus(args) -> int:
    rows = corpus_mod.run_corpus(args.name)
    print(corpus_mod.format_table(rows))
    ok = all(r.passed for r in rows)
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        with open(Path(args.out) / "corpus_report.json", "w") as fh:
            json.dump(_jsonable({"suite": args.name, "seed": args.seed, "rows": corpus_mod.rows_to_dicts(rows)}), fh,
                      indent=2)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isocurv", description="Isoperimetric checks for singular conformal metrics")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory")
        p.add_argument("--tol", type=float, default=1e-6, help="default check tolerance")
        p.add_argument("--seed", type=int, default=42, help="seed for randomized suites")
        p.add_argument("--cases", type=int, default=200, help="cases for randomized suites")
        p.add_argument("--parallel", type=int, default=1, help="worker processes")

    r = sub.add_parser("run", help="run the checks of a JSON configuration")
    r.add_argument("--config", required=True, help="JSON configuration file")
    common(r)
    r.set_defaults(func=_cmd_run)
    c = sub.add_parser("corpus", help="run curated oracle suites")
    c.add_argument("name", nargs="?", default="all", choices=["example1", "example2", "example3", "cones", "all"])
    common(c)
    c.set_defaults(func=_cmd_corpus)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
