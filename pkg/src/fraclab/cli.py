"""Batch command line: evaluate operators, run predicates, verify certificates.

Subcommands: eval | geom | curvature | verify | limit-study.  Every run reads
a scene (file or named fixture), executes deterministically under the given
seed, and emits a text/json/csv report.  Exit codes: 0 success, 1 parse
error, 2 validation error, 3 runtime failure, 4 mathematical findings
(a predicate failed or a certification did not hold; never used for crashes).
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import predicates, verify as verify_mod
from .errors import FraclabError, InvalidDimension, OutOfRange, ParseError, ValidationError
from .operators import OptimizerConfig, eval_eigenvalue, eval_truncated, local_limit_reference
from .quadrature import FracParams, eval_directional
from .report import Report, emit_report, sanitize
from .scenes import Scene, fixture_scene, parse_scene, quasi_random_points
from .verify import (
    punctured_min_test,
    verify_distance_supersolution,
    verify_indicator_supersolution,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_FINDINGS = 4


def _parse_points(spec: str, dim: int) -> np.ndarray:
    pts = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        coords = [float(c) for c in chunk.split(",")]
        if len(coords) != dim:
            raise ValidationError(
                f"point {chunk!r} has {len(coords)} coordinates, scene needs {dim}"
            )
        pts.append(coords)
    if not pts:
        raise ValidationError("no points given")
    return np.array(pts)


def _load_scene(args) -> Scene:
    if args.scene:
        scene = parse_scene(args.scene)
    elif args.fixture:
        scene = fixture_scene(args.fixture)
    else:
        raise ValidationError("pass --scene PATH or --fixture NAME")
    overrides = {}
    if args.s is not None:
        overrides["s"] = args.s
    if args.k is not None:
        overrides["k"] = args.k
    if overrides:
        s = overrides.get("s", scene.params.s)
        k = overrides.get("k", scene.params.k)
        if not 0.0 < s < 1.0:
            raise ValidationError(f"params.s must lie in (0,1), got {s}")
        scene.params = FracParams(s=s, k=k, n=scene.dimension)
    if args.restarts is not None or args.seed is not None or args.opt_tol is not None:
        scene.optimizer = OptimizerConfig(
            restarts=args.restarts or scene.optimizer.restarts,
            max_iters=scene.optimizer.max_iters,
            seed=scene.optimizer.seed if args.seed is None else args.seed,
            tol=args.opt_tol or scene.optimizer.tol,
        )
    return scene


def _common_flags(p: argparse.ArgumentParser):
    p.add_argument("--scene", help="scene file (JSON)")
    p.add_argument("--fixture", help="named fixture scene")
    p.add_argument("--points", help="semicolon-separated points: 'x,y,z;x,y,z'")
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--mode", choices=("frames", "subspaces"), default="frames")
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--opt-tol", dest="opt_tol", type=float, default=None)
    p.add_argument("--resolution", type=float, default=2.0, help="grid resolution, degrees")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p.add_argument("--out", default=None, help="write the report to this path")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fraclab", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("eval", help="evaluate operators at points")
    _common_flags(p)
    p.add_argument("--op", choices=("directional", "truncated", "eigenvalue"), required=True)
    p.add_argument("--xi", help="direction for --op directional: 'x,y,z'")

    p = sub.add_parser("geom", help="geometric predicates")
    _common_flags(p)
    p.add_argument("--cond", choices=("frames", "affine", "convex"), required=True)
    p.add_argument("--samples", type=int, default=None, help="quasi-random points outside U")
    p.add_argument("--h", type=float, default=0.1, help="grid spacing for --cond convex")
    p.add_argument("--m", type=int, default=16, help="segment samples for --cond convex")

    p = sub.add_parser("curvature", help="principal curvatures on the scene patch")
    _common_flags(p)
    p.add_argument("--curv-mode", choices=("sum_top_k", "single"), default="sum_top_k")

    p = sub.add_parser("verify", help="supersolution certificates")
    _common_flags(p)
    p.add_argument("--theorem", choices=("indicator", "distance", "punctured"), required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--truncated", action="store_true")
    p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("limit-study", help="compare against the local s -> 1 reference")
    _common_flags(p)
    p.add_argument("--op", choices=("directional", "truncated", "eigenvalue"), default="directional")
    p.add_argument("--xi", help="direction for --op directional")
    p.add_argument("--svals", default="0.9,0.95,0.99")

    return ap


# ---------------------------------------------------------------------------
# command implementations


def _run_eval(scene: Scene, args) -> Report:
    u = scene.field()
    pts = _parse_points(args.points, scene.dimension)
    records = []
    for i, x in enumerate(pts):
        if args.op == "directional":
            if not args.xi:
                raise ValidationError("--op directional requires --xi")
            xi = _parse_points(args.xi, scene.dimension)[0]
            val = eval_directional(u, x, xi, scene.params.s, scene.quadrature)
        elif args.op == "truncated":
            val = eval_truncated(u, x, scene.params, scene.quadrature, scene.optimizer)
        else:
            val = eval_eigenvalue(u, x, scene.params, scene.quadrature, scene.optimizer)
        records.append(
            {
                "index": i,
                "point": x,
                "value": val.value,
                "lo": val.lo,
                "hi": val.hi,
                "verdict": "ok",
                "witness": val.witness,
            }
        )
    summary = {"op": args.op, "points": len(records)}
    return Report("eval", _args_echo(args, scene), scene.optimizer.seed, records, summary)


def _geom_points(scene: Scene, args) -> np.ndarray:
    if args.points:
        return _parse_points(args.points, scene.dimension)
    count = args.samples or 50
    return quasi_random_points(
        scene.box, count, seed=scene.optimizer.seed, exclude=scene.set,
        require=scene.omega,
    )


def _run_geom(scene: Scene, args) -> Report:
    records = []
    findings = 0
    if args.cond == "convex":
        verdict = predicates.check_convex_components(
            scene._require_set(), scene.box, args.h, args.m, seed=scene.optimizer.seed
        )
        findings += int(verdict.fails)
        records.append(
            {
                "index": 0,
                "point": None,
                "value": None,
                "lo": None,
                "hi": None,
                "verdict": verdict.status,
                "witness": verdict.witness,
                "certificate": verdict.certificate,
                "detail": verdict.detail,
            }
        )
        summary = {"cond": "convex", "status": verdict.status, "h": args.h, "m": args.m}
        rep = Report("geom", _args_echo(args, scene), scene.optimizer.seed, records, summary)
        rep.exit_code = EXIT_FINDINGS if findings else EXIT_OK
        return rep

    pts = _geom_points(scene, args)
    for i, x in enumerate(pts):
        if args.cond == "frames":
            verdict = predicates.check_G(
                scene._require_set(), scene.omega, scene.params.k, x,
                scene.optimizer, args.resolution,
            )
        else:
            verdict = predicates.check_G_affine(
                scene._require_set(), scene.params.k, x, scene.optimizer, args.resolution
            )
        findings += int(verdict.fails)
        records.append(
            {
                "index": i,
                "point": x,
                "value": None,
                "lo": None,
                "hi": None,
                "verdict": verdict.status,
                "witness": verdict.witness,
                "certificate": verdict.certificate,
            }
        )
    counts = {
        "holds": sum(1 for r in records if r["verdict"] == "holds"),
        "fails": sum(1 for r in records if r["verdict"] == "fails"),
        "inconclusive": sum(1 for r in records if r["verdict"] == "inconclusive"),
    }
    summary = {"cond": args.cond, "k": scene.params.k, **counts}
    rep = Report("geom", _args_echo(args, scene), scene.optimizer.seed, records, summary)
    rep.exit_code = EXIT_FINDINGS if findings else EXIT_OK
    return rep


def _run_curvature(scene: Scene, args) -> Report:
    patch = scene.curvature_patch()
    if not args.points:
        raise ValidationError("curvature requires --points near the boundary")
    pts = _parse_points(args.points, scene.dimension)
    records = []
    findings = 0
    k = scene.params.k
    for i, x in enumerate(pts):
        p = predicates.project_to_boundary(patch, x, steps=5)
        kappa = predicates.principal_curvatures(patch, p)
        verdict = predicates.check_curvature(patch, p, k, args.curv_mode)
        findings += int(verdict.fails)
        records.append(
            {
                "index": i,
                "point": p,
                "value": verdict.detail.get("statistic"),
                "lo": None,
                "hi": None,
                "verdict": verdict.status,
                "witness": None,
                "curvatures": kappa,
            }
        )
    summary = {"mode": args.curv_mode, "k": k, "points": len(records)}
    rep = Report("curvature", _args_echo(args, scene), scene.optimizer.seed, records, summary)
    rep.exit_code = EXIT_FINDINGS if findings else EXIT_OK
    return rep


def _verify_samples(scene: Scene, args) -> np.ndarray:
    if args.points:
        return _parse_points(args.points, scene.dimension)
    return quasi_random_points(scene.box, args.samples, seed=scene.optimizer.seed)


def _run_verify(scene: Scene, args) -> Report:
    u_set = scene._require_set()
    if args.theorem == "punctured":
        if not args.points:
            raise ValidationError("--theorem punctured requires --points (minimum points)")
        pts = _parse_points(args.points, scene.dimension)
        records = []
        ok = True
        for i, x in enumerate(pts):
            rep = punctured_min_test(
                scene.field(), x, scene.params, mode=args.mode,
                spec=scene.quadrature, opt=scene.optimizer, search=scene.optimizer,
            )
            vanish = rep.minima_vanish and rep.lines_verified
            ok = ok and vanish
            records.append(
                {
                    "index": i,
                    "point": x,
                    "value": max(rep.minima),
                    "lo": None,
                    "hi": None,
                    "verdict": "certified" if vanish else "failed",
                    "witness": rep.limit_witness,
                    "minima": rep.minima,
                    "eps": rep.eps_values,
                }
            )
        summary = {"theorem": "punctured", "all_certified": ok}
        out = Report("verify", _args_echo(args, scene), scene.optimizer.seed, records, summary)
        out.exit_code = EXIT_OK if ok else EXIT_FINDINGS
        return out

    samples = _verify_samples(scene, args)
    if args.theorem == "indicator":
        tol = args.tol if args.tol is not None else 1e-12
        rep = verify_indicator_supersolution(
            u_set, scene.omega, scene.params.k, samples, scene.params.s,
            mode=args.mode, spec=scene.quadrature, search=scene.optimizer,
            resolution_deg=args.resolution, tol=tol,
        )
    else:
        tol = args.tol if args.tol is not None else 1e-6
        rep = verify_distance_supersolution(
            u_set, scene.params.k, samples, scene.params.s, mode=args.mode,
            truncated=args.truncated, spec=scene.quadrature, search=scene.optimizer,
            resolution_deg=args.resolution, tol=tol,
        )
    records = [
        {
            "index": r.index,
            "point": r.point,
            "value": r.value,
            "lo": r.lo,
            "hi": r.hi,
            "verdict": r.status,
            "witness": r.witness,
            "detail": r.detail,
        }
        for r in rep.records
    ]
    out = Report("verify", _args_echo(args, scene), scene.optimizer.seed, records, rep.summary())
    out.exit_code = EXIT_OK if rep.failed == 0 else EXIT_FINDINGS
    return out


def _run_limit_study(scene: Scene, args) -> Report:
    u = scene.field()
    if not args.points:
        raise ValidationError("limit-study requires --points")
    x = _parse_points(args.points, scene.dimension)[0]
    svals = sorted(float(v) for v in args.svals.split(","))
    k = scene.params.k
    records = []
    if args.op == "directional":
        if not args.xi:
            raise ValidationError("limit-study --op directional requires --xi")
        xi = _parse_points(args.xi, scene.dimension)[0]
        hess_target = None
        sum_target, kth_target = local_limit_reference(u, x, k)
        h = 1e-4 * (1.0 + float(np.linalg.norm(x)))
        hess_target = (
            u.value(x + h * xi) + u.value(x - h * xi) - 2 * u.value(x)
        ) / h**2
        target = hess_target
    else:
        sum_target, kth_target = local_limit_reference(u, x, k)
        target = sum_target if args.op == "truncated" else kth_target

    for s in svals:
        if args.op == "directional":
            val = eval_directional(u, x, xi, s, scene.quadrature)
        elif args.op == "truncated":
            val = eval_truncated(
                u, x, FracParams(s, k, scene.dimension), scene.quadrature, scene.optimizer
            )
        else:
            val = eval_eigenvalue(
                u, x, FracParams(s, k, scene.dimension), scene.quadrature, scene.optimizer
            )
        records.append(
            {
                "index": len(records),
                "point": x,
                "value": val.value,
                "lo": val.lo,
                "hi": val.hi,
                "verdict": "ok",
                "witness": val.witness,
                "s": s,
                "target": target,
                "abs_err": abs(val.value - target),
            }
        )
    errs = [r["abs_err"] for r in records]
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    rel_final = errs[-1] / max(abs(target), 1e-300)
    summary = {
        "op": args.op,
        "target": target,
        "errors_strictly_decreasing": decreasing,
        "final_relative_error": rel_final,
    }
    rep = Report("limit-study", _args_echo(args, scene), scene.optimizer.seed, records, summary)
    rep.exit_code = EXIT_OK if decreasing else EXIT_FINDINGS
    return rep


def _args_echo(args, scene: Scene) -> dict:
    echo = {k: v for k, v in vars(args).items() if k not in ("out",) and v is not None}
    echo["scene_name"] = scene.name
    echo["params"] = {"s": scene.params.s, "k": scene.params.k, "N": scene.dimension}
    return echo


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    t0 = time.perf_counter()
    try:
        scene = _load_scene(args)
        runner = {
            "eval": _run_eval,
            "geom": _run_geom,
            "curvature": _run_curvature,
            "verify": _run_verify,
            "limit-study": _run_limit_study,
        }[args.cmd]
        report = runner(scene, args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, OutOfRange, InvalidDimension) as e:
        print(f"validation error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except FraclabError as e:
        print(f"runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    report.wall_time = time.perf_counter() - t0
    text = emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
