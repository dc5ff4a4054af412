"""Command-line front end.

Subcommands parse problem-spec documents, dispatch the checkers, and emit a
deterministic JSON report (timings are the only nondeterministic block and
are dropped under --no-timings).  Exit codes: 0 the tool ran (verdict
failures are data, not errors), 2 input error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, corpus as corpus_mod, evp, minima, nonsmooth, optcond, vectopt
from .funcdsl import FuncDSLError, load_problem_spec
from .optcond import NonConvergenceError
from .results import _json_num
from .sampling import SamplePlan
from .vectopt import AlphaVector, VectorProblem

SCHEMA_VERSION = 1


class InputError(Exception):
    pass


def _build_plan(args):
    kwargs = {}
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.samples is not None:
        kwargs["ball_count"] = args.samples
    if args.stages is not None:
        kwargs["stages"] = args.stages
    if args.grid_res is not None:
        kwargs["grid_res"] = args.grid_res
    return SamplePlan(**kwargs)


def _digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _report(command, args, plan, results, input_digest=None, timings=None):
    report = {
        "schema": SCHEMA_VERSION,
        "tool": {"name": "approxmin", "version": __version__},
        "command": command,
        "plan": plan.to_dict(),
        "input_digest": input_digest,
        "results": _json_num(results),
    }
    if timings is not None and not args.no_timings:
        report["timings"] = timings
    return report


def _emit(report, args):
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_spec(path):
    try:
        return load_problem_spec(path)
    except (OSError, json.JSONDecodeError, FuncDSLError, KeyError) as exc:
        raise InputError(f"cannot load problem spec {path}: {exc}") from exc


def _candidates(spec, args):
    if args.at is not None:
        return [tuple(float(v) for v in args.at.split(","))]
    return list(spec.candidates)


def _parse_alpha(text):
    return [float(v) for v in text.split(",")]


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def _classify_checks(args, spec, x0, plan):
    f = spec.objective if spec.is_scalar else None
    domain = spec.domain
    checks = {}
    scalar_requested = any(
        v is not None
        for v in (args.eps_min, args.eps_quasi_min, args.quasi_min, args.regular_approx)
    ) or args.usual_min or args.lsc or args.continuity or args.bounded_below or args.wgm_iv
    if scalar_requested and f is None:
        raise InputError("scalar notion flags require a single-objective unconstrained spec")
    if args.usual_min:
        checks["usual-min"] = minima.check_usual_minimum(f, domain, x0, plan)
    if args.eps_min is not None:
        checks[f"eps-min({args.eps_min})"] = minima.check_eps_minimum(
            f, domain, x0, args.eps_min, plan
        )
    if args.eps_quasi_min is not None:
        checks[f"eps-quasi-min({args.eps_quasi_min})"] = minima.check_eps_quasi_minimum(
            f, domain, x0, args.eps_quasi_min, plan
        )
    if args.quasi_min is not None:
        checks[f"quasi-min-alpha({args.quasi_min})"] = minima.check_quasi_minimum_alpha(
            f, domain, x0, args.quasi_min, plan
        )
    if args.regular_approx is not None:
        checks[f"regular-approx({args.regular_approx})"] = minima.check_regular_approx(
            f, domain, x0, args.regular_approx, plan
        )
    if args.lsc:
        checks["lsc"] = nonsmooth.check_lsc(f, x0, plan, domain=domain)
    if args.continuity:
        checks["continuity"] = nonsmooth.check_continuity(f, x0, plan, domain=domain)
    if args.bounded_below:
        checks["bounded-below"] = minima.check_bounded_below(f, domain, plan)
    if args.wgm_iv:
        checks["wgm-condition-iv"] = minima.check_wgm_condition_iv(f, x0, plan, domain=domain)
    if args.efficient:
        vp = VectorProblem.from_problem_spec(spec)
        checks["efficient"] = vectopt.check_efficient(vp, x0, args.delta, plan)
    if args.quasi_efficient is not None:
        vp = VectorProblem.from_problem_spec(spec)
        alpha = AlphaVector.of(_parse_alpha(args.quasi_efficient), p=vp.p)
        checks["quasi-efficient"] = vectopt.check_quasi_efficient(vp, x0, alpha, args.delta, plan)
    return {name: verdict.to_dict() for name, verdict in sorted(checks.items())}


def cmd_classify(args):
    plan = _build_plan(args)
    spec = _load_spec(args.spec)
    candidates = _candidates(spec, args)
    start = time.monotonic()

    def one(pt):
        return {"candidate": list(pt), "checks": _classify_checks(args, spec, np.asarray(pt), plan)}

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(one, candidates))
    else:
        results = [one(pt) for pt in candidates]
    if not candidates:
        results = {"note": "no candidate points; vacuous report", "candidates": []}
    timings = {"wall_s": time.monotonic() - start}
    report = _report("classify", args, plan, results, _digest(args.spec), timings)
    _emit(report, args)
    return 0


# ---------------------------------------------------------------------------
# audit
# ---------------------------------------------------------------------------

def cmd_audit(args):
    plan = _build_plan(args)
    fixtures = corpus_mod.load_corpus(args.corpus_dir)
    if args.lsc_only:
        fixtures = [fx for fx in fixtures if "lsc" in fx.spec.tags]
    notion = _notion_from_args(args)
    start = time.monotonic()
    report_obj = minima.audit_notion(notion, fixtures, plan)
    timings = {"wall_s": time.monotonic() - start}
    report = _report("audit", args, plan, report_obj.to_dict(), None, timings)
    _emit(report, args)
    return 0


def _notion_from_args(args):
    tag = args.notion
    try:
        return minima.NotionId(
            tag=tag,
            eps=args.eps,
            alpha=args.alpha_scalar,
            delta=args.delta,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# ---------------------------------------------------------------------------
# evp / subdiff / fjcheck
# ---------------------------------------------------------------------------

def _plot_rows_1d(f, domain, plan):
    lo, hi = domain.bounding_box()
    lo = float(lo[0]) if np.isfinite(lo[0]) else -plan.window
    hi = float(hi[0]) if np.isfinite(hi[0]) else plan.window
    xs = np.linspace(lo, hi, plan.grid_res)
    pts = xs.reshape(-1, 1)
    mask = domain.contains(pts)
    vals = f.evaluate_batch(pts[mask])
    return [("grid", float(x), float(v)) for x, v in zip(xs[mask], vals)]


def _write_plot(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "x", "value"])
        for row in rows:
            writer.writerow(row)


def cmd_evp(args):
    plan = _build_plan(args)
    spec = _load_spec(args.spec)
    if not spec.is_scalar:
        raise InputError("the descent construction needs a scalar spec")
    if args.eps is None:
        raise InputError("--eps is required")
    lam = args.lam if args.lam is not None else 1.0
    f, domain = spec.objective, spec.domain
    results = []
    rows = []
    start = time.monotonic()
    for pt in _candidates(spec, args):
        x0 = np.asarray(pt, dtype=float)
        premise = evp.verify_evp_premise(f, domain, x0, args.eps, plan)
        entry = {"candidate": list(pt), "premise": premise.to_dict()}
        if premise.holds:
            cert = evp.ekeland_search(f, domain, x0, args.eps, lam, plan)
            entry["certificate"] = cert.to_dict()
            rows.extend(("trace", float(p[0]), float(v)) for p, v in cert.trace)
        results.append(entry)
    timings = {"wall_s": time.monotonic() - start}
    if args.plot_data:
        if domain.dim == 1:
            rows = _plot_rows_1d(f, domain, plan) + rows
        _write_plot(args.plot_data, rows)
    report = _report("evp", args, plan, results, _digest(args.spec), timings)
    _emit(report, args)
    return 0


def cmd_subdiff(args):
    plan = _build_plan(args)
    spec = _load_spec(args.spec)
    f, domain = spec.objective, spec.domain
    results = []
    rows = []
    start = time.monotonic()
    for pt in _candidates(spec, args):
        x0 = np.asarray(pt, dtype=float)
        try:
            approx = nonsmooth.clarke_subdiff(f, x0, plan)
        except nonsmooth.NotLocallyLipschitzError as exc:
            results.append({"candidate": list(pt), "error": str(exc)})
            continue
        entry = {
            "candidate": list(pt),
            "estimates": [list(map(float, g)) for g in approx.points],
            "radius": approx.radius,
            "fd_step": approx.fd_step,
            "lipschitz": approx.lipschitz,
        }
        if domain.dim == 1:
            lo, hi = approx.interval()
            entry["hull"] = [lo, hi]
        results.append(entry)
        rows.extend(("estimate", float(g[0]), 0.0) for g in approx.points)
    timings = {"wall_s": time.monotonic() - start}
    if args.plot_data:
        if domain.dim == 1:
            rows = _plot_rows_1d(f, domain, plan) + rows
        _write_plot(args.plot_data, rows)
    report = _report("subdiff", args, plan, results, _digest(args.spec), timings)
    _emit(report, args)
    return 0


def cmd_fjcheck(args):
    plan = _build_plan(args)
    spec = _load_spec(args.spec)
    vp = VectorProblem.from_problem_spec(spec)
    if args.alpha is None:
        raise InputError("--alpha is required")
    alpha = AlphaVector.of(_parse_alpha(args.alpha), p=vp.p)
    results = []
    rows = []
    start = time.monotonic()
    for pt in _candidates(spec, args):
        x0 = np.asarray(pt, dtype=float)
        if args.lam_list is not None:
            lam = _parse_alpha(args.lam_list)
            mu = _parse_alpha(args.mu_list) if args.mu_list else [0.0] * vp.m
            cert = optcond.check_fritz_john(vp, x0, alpha, lam, mu, plan)
        else:
            cert = optcond.find_multipliers(vp, x0, alpha, plan)
        results.append({"candidate": list(pt), "certificate": cert.to_dict()})
        rows.append(("trace", float(cert.residual), float(cert.searched)))
    timings = {"wall_s": time.monotonic() - start}
    if args.plot_data:
        if vp.n == 1:
            rows = _plot_rows_1d(vp.objectives[0], vp.domain, plan) + rows
        _write_plot(args.plot_data, rows)
    report = _report("fjcheck", args, plan, results, _digest(args.spec), timings)
    _emit(report, args)
    return 0


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def cmd_corpus(args):
    plan = _build_plan(args)
    if args.action == "list":
        fixtures = corpus_mod.load_corpus(args.corpus_dir)
        results = [
            {"name": fx.name, "tags": list(fx.spec.tags), "candidates": len(fx.spec.candidates)}
            for fx in fixtures
        ]
        report = _report("corpus-list", args, plan, results)
        _emit(report, args)
        return 0
    start = time.monotonic()
    fixtures = sorted(corpus_mod.load_corpus(args.corpus_dir), key=lambda fx: fx.name)
    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            partials = list(
                pool.map(lambda fx: corpus_mod.run_corpus(plan, fixtures=[fx]), fixtures)
            )
        rows = tuple(row for part in partials for row in part.rows)
        result = corpus_mod.CorpusResult(rows)
    else:
        result = corpus_mod.run_corpus(plan, fixtures=fixtures)
    timings = {"wall_s": time.monotonic() - start}
    report = _report("corpus-run", args, plan, result.to_dict(), None, timings)
    _emit(report, args)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--samples", type=int, default=None, help="ball samples per stage")
    p.add_argument("--stages", type=int, default=None)
    p.add_argument("--grid-res", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--no-timings", action="store_true")
    p.add_argument("--out", default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="approxmin",
        description="Verify approximate-minimum notions, descent certificates, "
        "sampled subdifferentials, and multiplier inclusions on piecewise specs.",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("classify", help="run notion checks at candidate points")
    p.add_argument("spec")
    p.add_argument("--at", default=None, help="comma-separated point overriding candidates")
    p.add_argument("--usual-min", action="store_true")
    p.add_argument("--eps-min", type=float, default=None)
    p.add_argument("--eps-quasi-min", type=float, default=None)
    p.add_argument("--quasi-min", type=float, default=None)
    p.add_argument("--regular-approx", type=float, default=None)
    p.add_argument("--lsc", action="store_true")
    p.add_argument("--continuity", action="store_true")
    p.add_argument("--bounded-below", action="store_true")
    p.add_argument("--wgm-iv", action="store_true")
    p.add_argument("--efficient", action="store_true")
    p.add_argument("--quasi-efficient", default=None, help="comma-separated alphas")
    p.add_argument("--delta", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("audit", help="audit a notion against the fixture corpus")
    p.add_argument("notion", choices=list(minima.NOTION_TAGS))
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--alpha", dest="alpha_scalar", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--corpus-dir", default=None)
    p.add_argument("--lsc-only", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("evp", help="construct and verify a descent certificate")
    p.add_argument("spec")
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--at", default=None)
    p.add_argument("--plot-data", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_evp)

    p = sub.add_parser("subdiff", help="sampled subdifferential at a point")
    p.add_argument("spec")
    p.add_argument("--at", default=None)
    p.add_argument("--plot-data", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_subdiff)

    p = sub.add_parser("fjcheck", help="multiplier inclusion residual at a point")
    p.add_argument("spec")
    p.add_argument("--at", default=None)
    p.add_argument("--alpha", default=None, help="comma-separated alphas")
    p.add_argument("--lambda", dest="lam_list", default=None, help="comma-separated lambdas")
    p.add_argument("--mu", dest="mu_list", default=None, help="comma-separated mus")
    p.add_argument("--plot-data", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_fjcheck)

    p = sub.add_parser("corpus", help="list or run the fixture corpus")
    p.add_argument("action", choices=["run", "list"])
    p.add_argument("--corpus-dir", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_corpus)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (FuncDSLError, FileNotFoundError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergenceError, nonsmooth.NotLocallyLipschitzError, evp.PremiseError,
            evp.DescentError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
