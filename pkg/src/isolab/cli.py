"""Command-line front door.

Each subcommand maps 1:1 to a library operation and writes exactly one JSON
document or one CSV table to stdout (or ``--output``).  Diagnostics go to
stderr only.  Exit codes: 0 success, 1 usage error, 2 domain/validation
error, 3 when a requested check fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import calculus, families, homogeneity, inequalities, polytope, search
from .errors import CheckFailedError, ConvergenceError, DomainError, GeometryError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_CHECK_FAILED = 3

# namespace for --fixed coordinate expressions in terms of s
_EXPR_NS = {
    "sqrt": math.sqrt, "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "exp": math.exp, "log": math.log, "pi": math.pi, "e": math.e,
}


@dataclass
class RunConfig:
    command: str
    family_id: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    grid: tuple[float, float, int] | None = None
    rtol: float = 1e-8
    output_format: str = "json"
    output_path: str | None = None
    seed: int = 0


def _parse_params(items: list[str] | None) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise DomainError(f"malformed parameter {item!r}, expected key=value")
        key, val = item.split("=", 1)
        if key == "branch":
            out[key] = val
        elif key == "n":
            out[key] = int(val)
        else:
            out[key] = float(val)
    return out


def _parse_grid(spec: str) -> np.ndarray:
    try:
        lo_s, hi_s, n_s = spec.split(":")
        lo, hi, n = float(lo_s), float(hi_s), int(n_s)
    except ValueError as exc:
        raise DomainError(f"malformed grid spec {spec!r}, expected lo:hi:n") from exc
    if n < 2:
        raise DomainError("grid needs at least 2 points")
    return np.linspace(lo, hi, n)


def _one_param_family(args) -> families.FamilySpec:
    spec = families.lookup(args.family, **_parse_params(getattr(args, "param", None)))
    if not isinstance(spec, families.FamilySpec):
        raise DomainError(f"{args.family!r} is a multi-parameter class, not a one-parameter family")
    return spec


def _nparam_class(name: str) -> families.NParamFamilySpec:
    spec = families.lookup(name)
    if isinstance(spec, families.FamilySpec):
        return families.as_nparam(spec)
    return spec


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _jdump(obj) -> str:
    return json.dumps(obj, indent=2)


# ------------------------------------------------------------------ #
# subcommand handlers
# ------------------------------------------------------------------ #


def cmd_families(args) -> int:
    _emit(args, families.catalog_json())
    return EXIT_OK


def cmd_eval(args) -> int:
    fam = _one_param_family(args)
    v, a = families.evaluate(fam, args.s)
    d = fam.dimension
    _emit(
        args,
        _jdump(
            {
                "family": fam.id,
                "s": args.s,
                "V": v,
                "A": a,
                "Q": homogeneity.isoperimetric_ratio(d, v, a),
                "r_tong": homogeneity.tong_inradius(d, v, a),
            }
        ),
    )
    return EXIT_OK


def cmd_inradius(args) -> int:
    fam = _one_param_family(args)
    grid = _parse_grid(args.grid)
    curve = calculus.inradius_by_quadrature(fam, args.s0, args.C, grid)
    _emit(args, curve.to_csv() if args.format == "csv" else curve.to_json())
    return EXIT_OK


def cmd_classify(args) -> int:
    fam = _one_param_family(args)
    grid = _parse_grid(args.grid)
    report = homogeneity.classify(fam, grid, rtol=args.rtol)
    _emit(args, report.to_json())
    print(
        f"{fam.id}: {report.verdict} (Q spread {report.q_rel_spread:.3e}, "
        f"residuals i={report.criterion_i_residual:.3e} "
        f"ii={report.criterion_ii_residual:.3e} iii={report.criterion_iii_residual:.3e})",
        file=sys.stderr,
    )
    if args.expect and args.expect != report.verdict:
        raise CheckFailedError(f"expected {args.expect}, got {report.verdict}")
    return EXIT_OK


def cmd_kmin(args) -> int:
    nfam = _nparam_class(args.cls)
    result = search.kmin(nfam, starts=args.starts, tol=args.tol, seed=args.seed)
    _emit(args, result.to_json())
    return EXIT_OK


def cmd_kmin_table(args) -> int:
    rows = search.kmin_table(starts=args.starts, tol=args.tol, seed=args.seed)
    _emit(args, _jdump(rows))
    return EXIT_OK


def cmd_trace(args) -> int:
    nfam = _nparam_class(args.cls)
    start = np.array([float(v) for v in args.start.split(",")])
    curve = search.trace_level_set(
        nfam, args.k, start, steps=args.steps, step_size=args.step_size
    )
    _emit(args, curve.to_csv() if args.format == "csv" else curve.to_json())
    return EXIT_OK


def cmd_solve_coordinate(args) -> int:
    nfam = _nparam_class(args.cls)
    fixed = {}
    for item in args.fixed:
        idx_s, expr = item.split("=", 1)
        fixed[int(idx_s)] = (
            lambda s, expr=expr: float(eval(expr, {"__builtins__": {}}, {**_EXPR_NS, "s": s}))
        )
    root = search.solve_coordinate(nfam, args.k, fixed, args.j, args.s)
    _emit(args, _jdump({"class": nfam.id, "k": args.k, "s": args.s, "j": args.j, "root": root}))
    return EXIT_OK


def _load_polyhedron(path: str) -> polytope.StarPolyhedron:
    with open(path) as fh:
        return polytope.from_json(fh.read())


def cmd_starlike(args) -> int:
    p = _load_polyhedron(args.file)
    dec = polytope.decompose(p)
    arith, harm = polytope.mean_altitudes(dec)
    _emit(
        args,
        _jdump(
            {
                "dimension": p.dimension,
                "facet_measures": dec.facet_measures.tolist(),
                "altitudes": dec.altitudes.tolist(),
                "pyramid_volumes": dec.pyramid_volumes.tolist(),
                "A": dec.total_area,
                "V": dec.total_volume,
                "mean_arithmetic": arith,
                "mean_harmonic": harm,
                "r_tong": p.dimension * dec.total_volume / dec.total_area,
            }
        ),
    )
    return EXIT_OK


def cmd_support_volume(args) -> int:
    p = _load_polyhedron(args.file)
    v_sup = polytope.volume_from_support(p)
    v_dec = polytope.decompose(p).total_volume
    _emit(
        args,
        _jdump(
            {
                "volume_from_support": v_sup,
                "volume_from_decomposition": v_dec,
                "relative_residual": abs(v_sup - v_dec) / v_dec,
            }
        ),
    )
    return EXIT_OK


def cmd_cohen(args) -> int:
    p = _load_polyhedron(args.file)
    residual = polytope.cohen_check(p, args.r)
    _emit(args, _jdump({"r": args.r, "residual": residual}))
    if residual > 1e-9:
        raise CheckFailedError(f"Cohen residual {residual} exceeds 1e-9")
    return EXIT_OK


def cmd_lift(args) -> int:
    base = _one_param_family(args)
    c = args.rho_scale
    lifted = polytope.lift_cylinder(
        base, rho=lambda s: c * s, drho=lambda s: c, rtol=args.rtol
    )
    grid = _parse_grid(args.grid)
    rows = []
    for s in grid:
        v, a = families.evaluate(lifted, float(s))
        rows.append(
            {"s": float(s), "V": v, "A": a,
             "r_tong": homogeneity.tong_inradius(lifted.dimension, v, a)}
        )
    _emit(args, _jdump({"id": lifted.id, "dimension": lifted.dimension, "samples": rows}))
    return EXIT_OK


def cmd_steiner(args) -> int:
    if args.box:
        shape = tuple(float(v) for v in args.box.split(","))
    elif args.polygon_file:
        with open(args.polygon_file) as fh:
            shape = np.asarray(json.load(fh), dtype=float)
    else:
        raise DomainError("pass either --box a,b,c or --polygon-file path")
    v, a = polytope.steiner_parallel_body(shape, args.s)
    vc, ac = polytope.steiner_coefficients(shape)
    _emit(args, _jdump({"s": args.s, "V": v, "A": a,
                        "volume_coefficients": list(vc), "area_coefficients": list(ac)}))
    return EXIT_OK


def cmd_bonnesen(args) -> int:
    if args.two_d:
        report = inequalities.bonnesen_2d(args.P, args.A, args.r)
    else:
        report = inequalities.bonnesen_general(args.d, args.V, args.A)
    _emit(args, report.to_json())
    for row in report.rows:
        print(
            f"{row.name}: lhs={row.lhs:.12g} rhs={row.rhs:.12g} "
            f"{'holds' if row.holds else 'FAILS'} (slack {row.slack:.6g})",
            file=sys.stderr,
        )
    if not report.all_hold:
        raise CheckFailedError("some inequality rows failed")
    return EXIT_OK


def cmd_deficit(args) -> int:
    value = inequalities.deficit(args.d, args.V, args.A)
    _emit(args, _jdump({"d": args.d, "V": args.V, "A": args.A, "deficit": value}))
    return EXIT_OK


# ------------------------------------------------------------------ #
# argument parsing
# ------------------------------------------------------------------ #


def _add_output_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", help="write the data document here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isolab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("families", help="family catalog as JSON")
    _add_output_opts(p)
    p.set_defaults(handler=cmd_families)

    p = sub.add_parser("eval", help="evaluate V, A, Q, r_tong of a family")
    p.add_argument("--family", required=True)
    p.add_argument("--param", action="append", help="key=value, repeatable")
    p.add_argument("--s", type=float, required=True)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("inradius", help="quadrature change-of-variable curve")
    p.add_argument("--family", required=True)
    p.add_argument("--param", action="append")
    p.add_argument("--s0", type=float, required=True)
    p.add_argument("--C", type=float, default=0.0)
    p.add_argument("--grid", required=True, help="lo:hi:n")
    _add_output_opts(p)
    p.set_defaults(handler=cmd_inradius)

    p = sub.add_parser("classify", help="homogeneity verdict over a grid")
    p.add_argument("--family", required=True)
    p.add_argument("--param", action="append")
    p.add_argument("--grid", required=True, help="lo:hi:n")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--expect", choices=("homogeneous", "not_homogeneous"))
    _add_output_opts(p)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("kmin", help="infimum of Q over a shape class")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_kmin)

    p = sub.add_parser("kmin-table", help="reproduce the isoperimetric-ratio table")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_kmin_table)

    p = sub.add_parser("trace", help="trace the level set Q = k")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--start", required=True, help="comma-separated coordinates")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--step-size", type=float, default=1e-2)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_trace)

    p = sub.add_parser("solve-coordinate", help="solve Q = k for one coordinate")
    p.add_argument("--class", dest="cls", required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--j", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--fixed", action="append", required=True,
                   help="i=expr(s), e.g. 0=sqrt(s); repeatable")
    _add_output_opts(p)
    p.set_defaults(handler=cmd_solve_coordinate)

    p = sub.add_parser("starlike", help="pyramid decomposition and altitude means")
    p.add_argument("--file", required=True, help="polyhedron JSON")
    _add_output_opts(p)
    p.set_defaults(handler=cmd_starlike)

    p = sub.add_parser("support-volume", help="support-function volume identity")
    p.add_argument("--file", required=True)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_support_volume)

    p = sub.add_parser("cohen", help="circumscribing-polytope volume check")
    p.add_argument("--file", required=True)
    p.add_argument("--r", type=float, required=True)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_cohen)

    p = sub.add_parser("lift", help="lift a 2D family to right cylinders")
    p.add_argument("--family", required=True, help="homogeneous base family")
    p.add_argument("--param", action="append")
    p.add_argument("--rho-scale", type=float, default=1.0, help="half-height = scale * s")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--grid", default="0.5:4:8", help="lo:hi:n")
    _add_output_opts(p)
    p.set_defaults(handler=cmd_lift)

    p = sub.add_parser("steiner", help="outer parallel body volume and area")
    p.add_argument("--box", help="a,b,c edge lengths")
    p.add_argument("--polygon-file", help="JSON array of CCW polygon vertices")
    p.add_argument("--s", type=float, required=True)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_steiner)

    p = sub.add_parser("bonnesen", help="Bonnesen inequality report")
    p.add_argument("--2d", dest="two_d", action="store_true")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--V", type=float)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--P", type=float)
    p.add_argument("--r", type=float)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_bonnesen)

    p = sub.add_parser("deficit", help="isoperimetric deficit")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--V", type=float, required=True)
    p.add_argument("--A", type=float, required=True)
    _add_output_opts(p)
    p.set_defaults(handler=cmd_deficit)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.handler(args)
    except CheckFailedError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except (DomainError, GeometryError, ConvergenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
