"""Checkers for scalar solution notions and the weak-generalization auditor.

Each checker scans a deterministic sample cloud; a failure carries the
maximally violating witness, a pass certifies only the census.  The auditor
operationalizes the four qualification criteria for weaker generalizations of
the minimum as searches over a fixture corpus, which is exactly how
counterexample-driven arguments work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .nonsmooth import check_continuity, check_lsc
from .results import FAILS, HOLDS, VACUOUS, SampleCensus, Verdict, Witness
from .sampling import domain_samples, expanding_samples

INF = math.inf

NOTION_TAGS = (
    "usual-min",
    "local-min",
    "eps-min",
    "local-eps-min",
    "eps-quasi-min",
    "regular-approx",
    "quasi-min-alpha",
)

# grid of levels below f(x0) probed by the deleted-neighborhood condition
_LEVEL_OFFSETS = tuple(2.0 ** j for j in range(-3, 5))


@dataclass(frozen=True)
class NotionId:
    """A solution notion plus its parameters (eps / alpha / delta as applicable)."""

    tag: str
    eps: float | None = None
    alpha: float | None = None
    delta: float | None = None

    def __post_init__(self):
        if self.tag not in NOTION_TAGS:
            raise ValueError(f"unknown notion tag {self.tag!r}")
        needs_eps = self.tag in ("eps-min", "local-eps-min", "eps-quasi-min", "regular-approx")
        if needs_eps and (self.eps is None or self.eps < 0):
            raise ValueError(f"notion {self.tag} needs eps >= 0")
        if self.tag == "quasi-min-alpha" and (self.alpha is None or self.alpha <= 0):
            raise ValueError("quasi-min-alpha needs alpha > 0")
        if self.tag in ("local-min", "local-eps-min") and self.delta is not None and self.delta <= 0:
            raise ValueError("local notions need delta > 0")

    def label(self):
        parts = [self.tag]
        if self.eps is not None:
            parts.append(f"eps={self.eps}")
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha}")
        if self.delta is not None:
            parts.append(f"delta={self.delta}")
        return " ".join(parts)


def _margin(f, tol):
    if tol is not None:
        return tol
    return 1e-12 if f.is_piecewise_linear else 1e-9


def _vacuous(census=None):
    return Verdict(VACUOUS, census=census or SampleCensus(), info={"note": "empty sample set"})


def _scan_violations(pts, mask, rank, values_at):
    """Build the verdict from a violation mask; witness maximizes the rank."""
    if not np.any(mask):
        return None
    ranked = np.where(mask, rank, -INF)
    best = np.max(ranked)
    tied = np.flatnonzero(ranked == best)
    # lexicographically smallest point among maximal violators
    order = np.lexsort(pts[tied].T[::-1])
    idx = int(tied[order[0]])
    return Witness(tuple(pts[idx]), values_at(idx))


def check_usual_minimum(f, domain, x0, plan, tol=None):
    """f(x) >= f(x0) over the sampled domain."""
    x0 = np.asarray(x0, dtype=float)
    margin = _margin(f, tol)
    samples = domain_samples(domain, plan, center=x0, include=(x0,))
    if samples.vacuous:
        return _vacuous(samples.census)
    fx0 = f.evaluate(x0)
    vals = f.evaluate_batch(samples.points)
    mask = vals < fx0 - margin
    witness = _scan_violations(
        samples.points, mask, fx0 - vals,
        lambda i: {"f_x": float(vals[i]), "f_x0": fx0},
    )
    if witness is None:
        return Verdict(HOLDS, census=samples.census, tolerance=margin)
    return Verdict(FAILS, witness=witness, census=samples.census, tolerance=margin)


def check_eps_minimum(f, domain, x0, eps, plan, tol=None):
    """f(x0) <= f(x) + eps over the sampled domain."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    x0 = np.asarray(x0, dtype=float)
    margin = _margin(f, tol)
    samples = domain_samples(domain, plan, center=x0, include=(x0,))
    if samples.vacuous:
        return _vacuous(samples.census)
    fx0 = f.evaluate(x0)
    vals = f.evaluate_batch(samples.points)
    mask = vals < fx0 - eps - margin
    witness = _scan_violations(
        samples.points, mask, fx0 - eps - vals,
        lambda i: {"f_x": float(vals[i]), "f_x0": fx0, "eps": eps},
    )
    info = {"eps": eps}
    if witness is None:
        return Verdict(HOLDS, census=samples.census, tolerance=margin, info=info)
    return Verdict(FAILS, witness=witness, census=samples.census, tolerance=margin, info=info)


def check_eps_quasi_minimum(f, domain, x0, eps, plan, tol=None):
    """f(x0) <= f(x) + sqrt(eps) * ||x - x0|| over the sampled domain."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    x0 = np.asarray(x0, dtype=float)
    margin = _margin(f, tol)
    slope = math.sqrt(eps)
    samples = domain_samples(domain, plan, center=x0, include=(x0,))
    if samples.vacuous:
        return _vacuous(samples.census)
    fx0 = f.evaluate(x0)
    vals = f.evaluate_batch(samples.points)
    dist = np.linalg.norm(samples.points - x0, axis=1)
    rhs = vals + slope * dist
    mask = rhs < fx0 - margin
    witness = _scan_violations(
        samples.points, mask, fx0 - rhs,
        lambda i: {"f_x": float(vals[i]), "f_x0": fx0, "eps": eps, "dist": float(dist[i])},
    )
    info = {"eps": eps, "slope": slope}
    if witness is None:
        return Verdict(HOLDS, census=samples.census, tolerance=margin, info=info)
    return Verdict(FAILS, witness=witness, census=samples.census, tolerance=margin, info=info)


def check_quasi_minimum_alpha(f, domain, x0, alpha, plan, tol=None):
    """f(x) >= f(x0) - alpha * ||x - x0|| over the sampled domain."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    x0 = np.asarray(x0, dtype=float)
    margin = _margin(f, tol)
    samples = domain_samples(domain, plan, center=x0, include=(x0,))
    if samples.vacuous:
        return _vacuous(samples.census)
    fx0 = f.evaluate(x0)
    vals = f.evaluate_batch(samples.points)
    dist = np.linalg.norm(samples.points - x0, axis=1)
    floor = fx0 - alpha * dist
    mask = vals < floor - margin
    witness = _scan_violations(
        samples.points, mask, floor - vals,
        lambda i: {"f_x": float(vals[i]), "f_x0": fx0, "alpha": alpha, "dist": float(dist[i])},
    )
    info = {"alpha": alpha}
    if witness is None:
        return Verdict(HOLDS, census=samples.census, tolerance=margin, info=info)
    return Verdict(FAILS, witness=witness, census=samples.census, tolerance=margin, info=info)


def check_regular_approx(f, domain, x0, eps, plan, tol=None):
    """Simultaneous eps-minimum and eps-quasi-minimum; fails with whichever witness."""
    first = check_eps_minimum(f, domain, x0, eps, plan, tol)
    if first.status != HOLDS:
        info = dict(first.info)
        info["failed_part"] = "eps-min"
        return Verdict(first.status, witness=first.witness, census=first.census,
                       tolerance=first.tolerance, info=info)
    second = check_eps_quasi_minimum(f, domain, x0, eps, plan, tol)
    info = dict(second.info)
    if second.status != HOLDS:
        info["failed_part"] = "eps-quasi-min"
        return Verdict(second.status, witness=second.witness, census=second.census,
                       tolerance=second.tolerance, info=info)
    census = SampleCensus(
        lattice=first.census.lattice + second.census.lattice,
        ball=first.census.ball + second.census.ball,
        total=first.census.total + second.census.total,
    )
    return Verdict(HOLDS, census=census, tolerance=second.tolerance, info=info)


_LOCAL_BASE = {
    "usual-min": lambda f, dom, x0, notion, plan, tol: check_usual_minimum(f, dom, x0, plan, tol),
    "local-min": lambda f, dom, x0, notion, plan, tol: check_usual_minimum(f, dom, x0, plan, tol),
    "eps-min": lambda f, dom, x0, notion, plan, tol: check_eps_minimum(f, dom, x0, notion.eps, plan, tol),
    "local-eps-min": lambda f, dom, x0, notion, plan, tol: check_eps_minimum(f, dom, x0, notion.eps, plan, tol),
    "eps-quasi-min": lambda f, dom, x0, notion, plan, tol: check_eps_quasi_minimum(f, dom, x0, notion.eps, plan, tol),
    "quasi-min-alpha": lambda f, dom, x0, notion, plan, tol: check_quasi_minimum_alpha(f, dom, x0, notion.alpha, plan, tol),
    "regular-approx": lambda f, dom, x0, notion, plan, tol: check_regular_approx(f, dom, x0, notion.eps, plan, tol),
}


def _restricted(domain, x0, delta):
    return domain.intersect_ball(np.asarray(x0, dtype=float), delta, closed=False)


def check_local_variant(notion, f, domain, x0, delta, plan, tol=None):
    """The notion's inequality restricted to the open ball B(x0, delta).

    With delta=None the radius schedule is searched and the first holding
    radius is reported; all radii failing is a failure at the last radius.
    """
    if notion.tag not in _LOCAL_BASE:
        raise ValueError(f"no local variant for notion {notion.tag!r}")
    runner = _LOCAL_BASE[notion.tag]
    if delta is not None:
        if delta <= 0:
            raise ValueError("delta must be positive")
        verdict = runner(f, _restricted(domain, x0, delta), x0, notion, plan, tol)
        info = dict(verdict.info)
        info["delta"] = delta
        return Verdict(verdict.status, witness=verdict.witness, census=verdict.census,
                       tolerance=verdict.tolerance, info=info)
    last = None
    for delta_k in plan.radii():
        verdict = runner(f, _restricted(domain, x0, delta_k), x0, notion, plan, tol)
        info = dict(verdict.info)
        info["delta"] = delta_k
        last = Verdict(verdict.status, witness=verdict.witness, census=verdict.census,
                       tolerance=verdict.tolerance, info=info)
        if last.status == HOLDS:
            return last
    return last


def check_bounded_below(f, domain, plan, tol=1e-9):
    """Finite-lower-bound probe on a window-doubling schedule.

    Fails when the sampled minimum keeps dropping with non-shrinking drops
    across the final windows (a diverging witness sequence); otherwise holds
    with the sampled infimum estimate.
    """
    stages = expanding_samples(domain, plan)
    mins, argmins, total = [], [], 0
    for width, pts in stages:
        if pts.shape[0] == 0:
            continue
        total += pts.shape[0]
        vals = f.evaluate_batch(pts)
        finite = np.isfinite(vals)
        if not np.any(finite):
            continue
        i = int(np.argmin(np.where(finite, vals, INF)))
        mins.append(float(vals[i]))
        argmins.append((width, tuple(pts[i]), float(vals[i])))
    census = SampleCensus(lattice=total, total=total)
    if not mins:
        return Verdict(VACUOUS, census=census, info={"note": "no finite values sampled"})
    running = np.minimum.accumulate(mins)
    drops = -np.diff(running)
    info = {"inf_estimate": float(running[-1]), "windows": len(mins)}
    diverging = (
        len(drops) >= 2
        and drops[-1] > tol
        and drops[-2] > tol
        and drops[-1] >= 0.75 * drops[-2]
    )
    if diverging:
        trail = argmins[-3:]
        witness = Witness(trail[-1][1], {"f_x": trail[-1][2], "window": trail[-1][0]})
        info["witness_sequence"] = [list(t[1]) + [t[2]] for t in trail]
        return Verdict(FAILS, witness=witness, census=census, tolerance=tol, info=info)
    return Verdict(HOLDS, census=census, tolerance=tol, info=info)


def check_wgm_condition_iv(f, x0, plan, tol=None, domain=None):
    """No level below f(x0) may upper-bound f on a deleted neighborhood.

    Probes levels l = f(x0) - 2^j on the shrinking-radius schedule; fails with
    the (l, delta) pair when every sampled deleted-neighborhood value is <= l.
    """
    from .sampling import ball_samples

    x0 = np.asarray(x0, dtype=float)
    fx0 = f.evaluate(x0)
    if math.isinf(fx0):
        raise ValueError("condition (iv) needs a finite value at the point")
    margin = _margin(f, tol)
    radii = plan.radii()
    stage_vals = []
    total = 0
    for stage, r in enumerate(radii, start=1):
        pts = ball_samples(x0, r, plan.ball_count, plan, stage=stage)
        keep = np.linalg.norm(pts - x0, axis=1) > 0
        pts = pts[keep]
        if domain is not None:
            pts = pts[domain.contains(pts)]
        total += pts.shape[0]
        stage_vals.append((r, f.evaluate_batch(pts) if pts.shape[0] else np.empty(0)))
    census = SampleCensus(ball=total, total=total)
    failing = []
    for offset in _LEVEL_OFFSETS:
        level = fx0 - offset
        for r, vals in stage_vals:
            if vals.shape[0] and np.all(vals <= level + margin):
                failing.append((level, r))
                break
    info = {"levels": [fx0 - o for o in _LEVEL_OFFSETS]}
    if failing:
        level, r = failing[0]
        info["failing_pairs"] = [[l, r_] for l, r_ in failing]
        witness = Witness(tuple(x0), {"level": level, "delta": r, "f_x0": fx0})
        return Verdict(FAILS, witness=witness, census=census, tolerance=margin, info=info)
    return Verdict(HOLDS, census=census, tolerance=margin, info=info)


# ---------------------------------------------------------------------------
# Auditor
# ---------------------------------------------------------------------------

SATISFIED = "satisfied"
VIOLATED = "violated"
NOT_DECIDABLE = "not-decidable-by-sampling"


@dataclass(frozen=True)
class ConditionFinding:
    condition: str
    status: str
    fixtures: tuple = ()
    detail: str = ""

    def to_dict(self):
        return {
            "condition": self.condition,
            "status": self.status,
            "fixtures": list(self.fixtures),
            "detail": self.detail,
        }


@dataclass(frozen=True)
class WgmReport:
    """Per-condition audit of a notion against the fixture corpus."""

    notion: NotionId
    findings: tuple  # ConditionFinding per condition i..iv
    qualified: bool
    instances: tuple = ()

    def finding(self, condition):
        for f in self.findings:
            if f.condition == condition:
                return f
        raise KeyError(condition)

    def to_dict(self):
        return {
            "notion": self.notion.label(),
            "qualified": self.qualified,
            "findings": [f.to_dict() for f in self.findings],
            "instances": [list(i) for i in self.instances],
        }


def _notion_verdict(notion, f, domain, x0, plan):
    runner = _LOCAL_BASE[notion.tag]
    if notion.tag in ("local-min", "local-eps-min"):
        return check_local_variant(notion, f, domain, x0, notion.delta, plan)
    return runner(f, domain, x0, notion, plan, None)


def audit_notion(notion, fixtures, plan):
    """Audit a notion against scalar fixtures for the four qualification criteria.

    (i) usual minima must be accepted; (ii) no accepted instance may lack a
    finite lower bound; (iii) an accepted discontinuous instance must exist to
    demonstrate that continuity is not implied (absence is reported as
    not decidable, not as a violation); (iv) no accepted instance may admit an
    upper bound below its value on a deleted neighborhood.
    """
    rows = []
    for fixture in sorted(fixtures, key=lambda fx: fx.name):
        spec = fixture.spec if hasattr(fixture, "spec") else fixture
        if not spec.is_scalar:
            continue
        f = spec.objective
        for ci, candidate in enumerate(spec.candidates):
            label = spec.name if len(spec.candidates) == 1 else f"{spec.name}[{ci}]"
            x0 = np.asarray(candidate, dtype=float)
            accepted = _notion_verdict(notion, f, spec.domain, x0, plan).holds
            rows.append({
                "label": label,
                "f": f,
                "domain": spec.domain,
                "x0": x0,
                "accepted": accepted,
            })
    instances = tuple((r["label"], "accepted" if r["accepted"] else "rejected") for r in rows)

    # (i) usual minima must be accepted
    violators_i, usual_accepted = [], []
    for r in rows:
        if check_usual_minimum(r["f"], r["domain"], r["x0"], plan).holds:
            if r["accepted"]:
                usual_accepted.append(r["label"])
            else:
                violators_i.append(r["label"])
    finding_i = ConditionFinding(
        "i",
        VIOLATED if violators_i else SATISFIED,
        tuple(violators_i or usual_accepted),
        "usual minima rejected by the notion" if violators_i
        else "all sampled usual minima are accepted",
    )

    # (ii) accepted instances must be bounded below
    bounded_cache = {}
    violators_ii = []
    for r in rows:
        if not r["accepted"]:
            continue
        key = id(r["f"])
        if key not in bounded_cache:
            bounded_cache[key] = check_bounded_below(r["f"], r["domain"], plan)
        if bounded_cache[key].fails:
            violators_ii.append(r["label"])
    finding_ii = ConditionFinding(
        "ii",
        VIOLATED if violators_ii else SATISFIED,
        tuple(violators_ii),
        "accepted instance with no finite lower bound" if violators_ii
        else "every accepted instance is bounded below on samples",
    )

    # (iii) accepted + discontinuous at the candidate demonstrates "not continuity"
    demonstrators, lsc_failures = [], []
    for r in rows:
        if not r["accepted"]:
            continue
        if check_continuity(r["f"], r["x0"], plan, domain=r["domain"]).fails:
            demonstrators.append(r["label"])
        if check_lsc(r["f"], r["x0"], plan, domain=r["domain"]).fails:
            lsc_failures.append(r["label"])
    detail = "accepted discontinuous instance found"
    if not demonstrators:
        detail = "no accepted discontinuous instance in this corpus"
    if lsc_failures:
        detail += f"; lsc fails at accepted points: {', '.join(lsc_failures)}"
    finding_iii = ConditionFinding(
        "iii",
        SATISFIED if demonstrators else NOT_DECIDABLE,
        tuple(demonstrators),
        detail,
    )

    # (iv) accepted instances must not admit deleted-neighborhood upper bounds
    violators_iv = []
    for r in rows:
        if not r["accepted"]:
            continue
        if check_wgm_condition_iv(r["f"], r["x0"], plan, domain=r["domain"]).fails:
            violators_iv.append(r["label"])
    finding_iv = ConditionFinding(
        "iv",
        VIOLATED if violators_iv else SATISFIED,
        tuple(violators_iv),
        "accepted instance admits a deleted-neighborhood upper bound" if violators_iv
        else "no accepted instance violates the deleted-neighborhood condition",
    )

    findings = (finding_i, finding_ii, finding_iii, finding_iv)
    qualified = all(f.status != VIOLATED for f in findings)
    return WgmReport(notion=notion, findings=findings, qualified=qualified, instances=instances)
