"""Command line front end.  Every command prints one JSON document to stdout."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction

from . import conjecture, oscillatory, residue
from .fan import (candidate_poles, covers_orthant, normal_fan, numerical_data,
                  subdivide_simplicial, refine_simple)
from .polynomial import ParseError, Polynomial, ZeroPolynomial, emit, parse
from .spectral import Analysis, TriState, analyze, projection_condition

SCHEMA_VERSION = 1

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_UNAVAILABLE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------- encoding

def rational(x) -> dict:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def cplx(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _jsonable(x):
    if isinstance(x, Fraction):
        return rational(x)
    if isinstance(x, complex):
        return cplx(x)
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def tristate(t: TriState) -> dict:
    return {"verdict": t.verdict.value, "tag": t.tag,
            "witness": _jsonable(t.witness) if t.witness is not None else None,
            "residual": t.residual, "note": t.note}


def _face(face) -> dict:
    return {"vertices": [list(v) for v in face.vertices], "recession": list(face.recession),
            "dim": face.dim, "compact": face.compact}


def _input(f: Polynomial, text: str) -> dict:
    return {"text": text, "variables": list(f.variables), "normalized": emit(f),
            "terms": [{"exponent": list(e), "coefficient": rational(c)} for e, c in f.terms.items()]}


def _diagonal(rep) -> dict:
    return {"t0": rational(rep.t0), "s0": rational(rep.s0), "rho": rep.rho, "m": rep.m,
            "tau0": _face(rep.tau0), "compact": rep.compact, "s0_integral": rep.s0_integral,
            "permutation": list(rep.permutation),
            "tau0_facets": [{"normal": list(nv), "offset": o}
                            for nv, o in zip(rep.normals, rep.offsets)]}


def _analysis_doc(a: Analysis, text: str) -> dict:
    f = a.f
    doc = {
        "schema_version": SCHEMA_VERSION,
        "input": _input(f, text),
        "diagonal": _diagonal(a.diagonal),
        "facets": [{"normal": list(fc.normal), "offset": fc.offset} for fc in a.polyhedron.facets],
        "stability": {
            "overall": tristate(a.stability.overall_stable),
            "per_variable": [dict(variable=f.variables[j], index=j, **tristate(v))
                             for j, v in a.stability.per_variable],
            "unstable_variables": [f.variables[j] for j, v in a.stability.per_variable
                                   if v.certified],
        },
        "sharp": {k: tristate(getattr(a.sharp, k)) for k in ("a", "b", "c")},
        "star": None,
        "projection_condition": None,
        "warnings": list(a.warnings),
    }
    if a.star is not None:
        fs, rs, factor = a.star
        doc["star"] = {"applied": True, "phase": emit(fs), "diagonal": _diagonal(rs),
                       "mu_factor": cplx(factor)}
    if a.diagonal.compact:
        pc = projection_condition(f, a.diagonal, a.polyhedron)
        doc["projection_condition"] = {
            "any": any(ok for _, ok in pc),
            "orderings": [{"axes": list(ax), "holds": ok} for ax, ok in pc]}
    return doc


# --------------------------------------------------------------------------- commands

def _poly(args) -> Polynomial:
    names = [v.strip() for v in args.vars.split(",")] if args.vars else None
    return parse(args.polynomial, names)


def _phi0(args) -> float:
    return float(Fraction(args.phi0))


def _radius(args) -> float:
    return float(Fraction(args.radius))


def cmd_analyze(args) -> tuple[dict, int]:
    f = _poly(args)
    return _analysis_doc(analyze(f, args.seed), args.polynomial), EXIT_OK


def _amplitude(args, n) -> oscillatory.Amplitude:
    kind = args.amplitude or ("bump" if n == 1 else "product_bump")
    return oscillatory.Amplitude(kind, _radius(args), _phi0(args))


def _fit(f, a: Analysis, args):
    amp = _amplitude(args, f.n)
    return oscillatory.fit_leading(f, amp, a.diagonal, args.t_min, args.t_max, args.count,
                                   args.delta, args.tol)


def cmd_mu(args) -> tuple[dict, int]:
    f = _poly(args)
    a = analyze(f, args.seed)
    methods = ["formula", "residue", "fit"] if args.method == "all" else [args.method]
    results, errors = {}, {}
    for m in methods:
        try:
            if m == "formula":
                results[m] = residue.theorem3(f, _phi0(args), a).to_json()
            elif m == "residue":
                results[m] = residue.residue_via_theorem1(f, _phi0(args), a, args.seed).to_json()
            else:
                results[m] = _fit(f, a, args).to_json()
        except (ValueError, ArithmeticError) as exc:
            errors[m] = {"error": type(exc).__name__, "message": str(exc)}
    deltas = {}
    names = sorted(results)
    for i, p in enumerate(names):
        for q in names[i + 1:]:
            zp = complex(results[p]["mu_re"], results[p]["mu_im"])
            zq = complex(results[q]["mu_re"], results[q]["mu_im"])
            deltas[f"{p}-{q}"] = abs(zp - zq) / max(abs(zp), abs(zq), 1e-300)
    doc = {"schema_version": SCHEMA_VERSION, "input": _input(f, args.polynomial),
           "diagonal": _diagonal(a.diagonal), "phi0": _phi0(args), "radius": _radius(args),
           "results": results, "unavailable": errors, "relative_deltas": deltas,
           "warnings": list(a.warnings)}
    return doc, EXIT_OK if results else EXIT_UNAVAILABLE


def cmd_fan(args) -> tuple[dict, int]:
    f = _poly(args)
    a = analyze(f, args.seed)
    P = a.polyhedron
    F = normal_fan(P)
    if args.simple:
        F = refine_simple(subdivide_simplicial(F))
    doc = {"schema_version": SCHEMA_VERSION, "input": _input(f, args.polynomial),
           "simple_refinement": bool(args.simple), **F.to_json(),
           "numerical_data": [{"ray": list(d.ray), "N": d.N, "nu": d.nu}
                              for d in (numerical_data(r, P) for r in F.rays)],
           "candidate_poles": [{"pole": rational(p), "multiplicity_bound": b}
                               for p, b in candidate_poles(F, P).items()],
           "all_simple": all(c.is_simple() for c in F.maximal_cones())}
    if args.simple:
        doc["covers_orthant"] = covers_orthant(F)
    return doc, EXIT_OK


def cmd_scan(args) -> tuple[dict, int]:
    try:
        rep = conjecture.scan(args.n, args.bound)
    except conjecture.GuardExceeded as exc:
        raise UsageError(str(exc)) from None
    paths = {}
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        stem = os.path.join(args.out, f"scan_n{args.n}_b{args.bound}")
        paths = {"csv": stem + ".csv", "json": stem + ".json"}
        conjecture.write_outputs(rep, paths["csv"], paths["json"])
    doc = {"schema_version": SCHEMA_VERSION, **rep.to_json(), "files": paths}
    return doc, EXIT_VIOLATIONS if rep.violations else EXIT_OK


def cmd_model(args) -> tuple[dict, int]:
    p = oscillatory.ModelParams(float(Fraction(args.eps)), float(Fraction(args.eta)), _phi0(args))
    asym = oscillatory.model_integral_asymptotic(p, args.t)
    num = oscillatory.model_integral(p, args.t, args.tol)
    doc = {"schema_version": SCHEMA_VERSION, "eps": p.eps, "eta": p.eta, "theta0": p.theta0,
           "t": args.t, "asymptotic": cplx(asym), "numeric": cplx(num.value),
           "error_estimate": num.error,
           "relative_difference": abs(num.value - asym) / abs(asym)}
    return doc, EXIT_OK


def cmd_fit(args) -> tuple[dict, int]:
    f = _poly(args)
    a = analyze(f, args.seed)
    r = _fit(f, a, args)
    if args.out:
        oscillatory.write_samples(args.out, r.t_grid, r.samples, r.sample_errors)
    doc = {"schema_version": SCHEMA_VERSION, "input": _input(f, args.polynomial),
           "fit": r.to_json(), "samples_csv": args.out, "warnings": list(a.warnings)}
    return doc, EXIT_OK


# --------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=True,
                        help="emit JSON (the only format)")
    common.add_argument("--radius", default="1/2", help="amplitude radius r")
    common.add_argument("--phi0", default="1", help="amplitude value at the origin")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized falsifiers")
    common.add_argument("--tol", type=float, default=1e-8, help="quadrature tolerance")
    common.add_argument("--vars", default=None, help="comma separated variable order")

    fitopts = argparse.ArgumentParser(add_help=False)
    fitopts.add_argument("--t-min", type=float, default=1e2)
    fitopts.add_argument("--t-max", type=float, default=1e4)
    fitopts.add_argument("--count", type=int, default=20)
    fitopts.add_argument("--delta", type=float, default=0.5,
                         help="gap to the second term when rho = 1")
    fitopts.add_argument("--amplitude", choices=["bump", "product_bump"], default=None,
                         help="default: bump for one variable, product_bump otherwise")

    ap = argparse.ArgumentParser(prog="newtonosc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="diagonal data, stability, conditions")
    p.add_argument("polynomial")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("mu", parents=[common, fitopts], help="leading coefficient")
    p.add_argument("polynomial")
    p.add_argument("--method", choices=["formula", "residue", "fit", "all"], default="all")
    p.set_defaults(func=cmd_mu)

    p = sub.add_parser("fan", parents=[common], help="normal fan and numerical data")
    p.add_argument("polynomial")
    p.add_argument("--simple", action="store_true", help="refine to a unimodular fan")
    p.set_defaults(func=cmd_fan)

    p = sub.add_parser("scan", parents=[common], help="exhaustive simplex scan")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--out", default=None, help="directory for the CSV and JSON outputs")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("model", parents=[common], help="one-dimensional model integral")
    p.add_argument("--eps", required=True)
    p.add_argument("--eta", required=True)
    p.add_argument("--t", type=float, required=True)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("fit", parents=[common, fitopts], help="sample and fit the integral")
    p.add_argument("polynomial")
    p.add_argument("--out", default=None, help="CSV file for the samples")
    p.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc, code = args.func(args)
    except (ParseError, ZeroPolynomial, UsageError) as exc:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "error": type(exc).__name__,
                          "message": str(exc)}), file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "error": type(exc).__name__,
                          "message": str(exc)}), file=sys.stderr)
        return EXIT_UNAVAILABLE
    json.dump(doc, sys.stdout, indent=2, sort_keys=True, allow_nan=False, default=_jsonable)
    sys.stdout.write("\n")
    return code
