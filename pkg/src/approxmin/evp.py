"""Constructive Ekeland point search and certificate verification.

Given an eps-minimizer x0 of a bounded-below lower-semicontinuous function,
the descent iteration produces a point x_lam certified to satisfy, on the
sample grid: (i) no increase of f, (ii) distance at most lambda from x0, and
(iii) global minimality of f perturbed by the slope eps/lambda.  The search is
grid-constrained; the certificate records the grid so the three checks can be
re-verified independently on a finer one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .minima import _margin, check_bounded_below, check_lsc
from .results import FAILS, HOLDS, VACUOUS, SampleCensus, Verdict, Witness
from .sampling import domain_samples

INF = math.inf


class PremiseError(Exception):
    pass


class DescentError(Exception):
    pass


@dataclass(frozen=True)
class EvpCertificate:
    eps: float
    lam: float
    x0: tuple
    x_lambda: tuple
    residual_no_increase: float      # f(x_lam) - f(x0), check (i)
    distance: float                  # ||x_lam - x0||, check (ii)
    max_violation: float             # max over grid of check (iii) slack
    trace: tuple                     # ((point, value), ...) along the descent
    grid_points: int
    tolerance: float = 1e-9
    note: str = ""

    @property
    def valid(self):
        return (
            self.residual_no_increase <= self.tolerance
            and self.distance <= self.lam + self.tolerance
            and self.max_violation <= self.tolerance
        )

    def to_dict(self):
        return {
            "eps": self.eps,
            "lambda": self.lam,
            "x0": list(self.x0),
            "x_lambda": list(self.x_lambda),
            "residual_no_increase": self.residual_no_increase,
            "distance": self.distance,
            "max_violation": self.max_violation,
            "trace_length": len(self.trace),
            "grid_points": self.grid_points,
            "tolerance": self.tolerance,
            "valid": self.valid,
            "note": self.note,
        }


def _search_grid(f, domain, x0, plan):
    samples = domain_samples(domain, plan, center=x0, include=(x0,))
    return samples


def verify_evp_premise(f, domain, x0, eps, plan, tol=None):
    """Check f(x0) <= inf f + eps on samples, plus the standing hypotheses.

    The verdict also requires the finite-lower-bound probe and spot
    lower-semicontinuity checks at candidate-independent grid points to pass;
    sub-verdicts are recorded in the info block.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    x0 = np.asarray(x0, dtype=float)
    margin = _margin(f, tol)
    samples = _search_grid(f, domain, x0, plan)
    if samples.vacuous:
        return Verdict(VACUOUS, census=samples.census, info={"note": "empty domain sample"})
    vals = f.evaluate_batch(samples.points)
    finite = np.isfinite(vals)
    info = {"eps": eps}
    if not np.any(finite):
        info["note"] = "identically +inf on samples; statement is trivial"
        return Verdict(HOLDS, census=samples.census, tolerance=margin, info=info)
    inf_est = float(np.min(vals[finite]))
    fx0 = f.evaluate(x0)
    info["inf_estimate"] = inf_est
    info["f_x0"] = fx0

    bounded = check_bounded_below(f, domain, plan)
    info["bounded_below"] = bounded.status
    lo, hi = samples.points.min(axis=0), samples.points.max(axis=0)
    spots = np.linspace(0.15, 0.85, 4)
    lsc_status = []
    for t in spots:
        pt = lo + t * (hi - lo)
        proj = domain.project(pt.reshape(1, -1))[0]
        if domain.contains(proj.reshape(1, -1))[0]:
            lsc_status.append(check_lsc(f, proj, plan, domain=domain).status)
    info["lsc_spot_checks"] = lsc_status

    gap = fx0 - (inf_est + eps)
    premise_ok = gap <= margin
    hypotheses_ok = bounded.holds and all(s == HOLDS for s in lsc_status)
    if premise_ok and hypotheses_ok:
        return Verdict(HOLDS, census=samples.census, tolerance=margin, info=info)
    if not premise_ok:
        i = int(np.argmin(np.where(finite, vals, INF)))
        witness = Witness(tuple(samples.points[i]),
                          {"f_x": float(vals[i]), "f_x0": fx0, "eps": eps, "gap": float(gap)})
        return Verdict(FAILS, witness=witness, census=samples.census, tolerance=margin, info=info)
    witness = Witness(tuple(x0), {"f_x0": fx0})
    info["note"] = "standing hypotheses failed"
    return Verdict(FAILS, witness=witness, census=samples.census, tolerance=margin, info=info)


def _lex_argmin(points, keys):
    best = np.min(keys)
    tied = np.flatnonzero(keys <= best + 0.0)
    order = np.lexsort(points[tied].T[::-1])
    return int(tied[order[0]])


def ekeland_search(f, domain, x0, eps, lam=1.0, plan=None, tol=1e-9, refine_rounds=8):
    """Grid descent producing a certified Ekeland point.

    From x_k, the next iterate minimizes f(x) + (eps/lam) ||x - x_k|| over the
    sampled improvement set {x : f(x) <= f(x_k) - (eps/lam) ||x - x_k||},
    ties broken by the lexicographically smallest point; the iteration stops
    when no sampled improvement remains, then repeats on local lattices of
    geometrically shrinking spacing around the stop point.
    """
    if plan is None:
        raise ValueError("a SamplePlan is required")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    x0 = np.asarray(x0, dtype=float)
    samples = _search_grid(f, domain, x0, plan)
    vals = f.evaluate_batch(samples.points) if not samples.vacuous else np.empty(0)
    finite = np.isfinite(vals) if vals.size else np.zeros(0, dtype=bool)

    if eps == 0.0 or not np.any(finite):
        note = "trivial: eps = 0" if eps == 0.0 else "trivial: f is +inf on samples"
        if eps == 0.0 and np.any(finite):
            premise = verify_evp_premise(f, domain, x0, eps, plan)
            if premise.fails:
                raise PremiseError("eps = 0 requires x0 to be a sampled minimizer")
        return EvpCertificate(
            eps=eps, lam=lam, x0=tuple(x0), x_lambda=tuple(x0),
            residual_no_increase=0.0, distance=0.0, max_violation=0.0,
            trace=((tuple(x0), f.evaluate(x0)),), grid_points=int(vals.size),
            tolerance=tol, note=note,
        )

    premise = verify_evp_premise(f, domain, x0, eps, plan)
    if not premise.holds:
        raise PremiseError(f"premise does not hold: {premise.to_dict()}")

    kappa = eps / lam
    pts = samples.points
    current = x0.copy()
    f_current = f.evaluate(current)
    trace = [(tuple(current), f_current)]

    def descend():
        nonlocal current, f_current
        cap = 10 * pts.shape[0] + 100
        for _ in range(cap):
            dist = np.linalg.norm(pts - current, axis=1)
            improving = (vals <= f_current - kappa * dist) & (dist > 0) & finite
            if not np.any(improving):
                return
            objective = np.where(improving, vals + kappa * dist, INF)
            idx = _lex_argmin(pts, objective)
            current = pts[idx].copy()
            f_current = float(vals[idx])
            trace.append((tuple(current), f_current))
        raise DescentError("descent exceeded the iteration cap")

    descend()
    # local lattice refinement: the same descent rule on shrinking spacings,
    # so the iterate converges to the continuum descent point and check (iii)
    # re-verifies on finer grids
    from .sampling import _axis_resolution, _clip_bounds

    lo, hi = _clip_bounds(domain, plan, center=x0)
    res = _axis_resolution(plan, x0.size)
    spacing = float(np.max((hi - lo) / max(res - 1, 1)))
    offsets = np.arange(-16, 17, dtype=float)
    for _ in range(refine_rounds):
        spacing /= 8.0
        axes = [current[i] + offsets * spacing for i in range(x0.size)]
        mesh = np.meshgrid(*axes, indexing="ij")
        local = np.stack([m.ravel() for m in mesh], axis=1)
        local = local[domain.contains(local)]
        if local.shape[0] == 0:
            continue
        local_vals = f.evaluate_batch(local)
        pts = np.vstack([pts, local])
        vals = np.concatenate([vals, local_vals])
        finite = np.concatenate([finite, np.isfinite(local_vals)])
        descend()

    dist_l = np.linalg.norm(pts - current, axis=1)
    slack = np.where(finite, f_current - vals - kappa * dist_l, -INF)
    return EvpCertificate(
        eps=eps, lam=lam, x0=tuple(x0), x_lambda=tuple(current),
        residual_no_increase=f_current - trace[0][1],
        distance=float(np.linalg.norm(current - x0)),
        max_violation=float(np.max(slack)),
        trace=tuple(trace),
        grid_points=int(pts.shape[0]),
        tolerance=tol,
        note="",
    )


def verify_certificate(f, domain, cert, plan, resolution_factor=2):
    """Re-verify the three certificate checks on an independently finer grid."""
    fine_plan = replace(
        plan,
        grid_res=plan.grid_res * resolution_factor,
        max_grid_points=plan.max_grid_points * resolution_factor ** 2,
    )
    x0 = np.asarray(cert.x0, dtype=float)
    x_lam = np.asarray(cert.x_lambda, dtype=float)
    samples = domain_samples(domain, fine_plan, center=x0, include=(x0, x_lam))
    vals = f.evaluate_batch(samples.points)
    finite = np.isfinite(vals)
    kappa = cert.eps / cert.lam if cert.lam > 0 else 0.0
    f_lam = f.evaluate(x_lam)
    f_x0 = f.evaluate(x0)
    dist = np.linalg.norm(samples.points - x_lam, axis=1)
    slack = np.where(finite, f_lam - vals - kappa * dist, -INF)
    max_violation = float(np.max(slack)) if slack.size else 0.0
    return (
        f_lam - f_x0 <= cert.tolerance
        and float(np.linalg.norm(x_lam - x0)) <= cert.lam + cert.tolerance
        and max_violation <= cert.tolerance
    )
