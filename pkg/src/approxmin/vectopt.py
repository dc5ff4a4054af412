"""Vector problems, efficiency and quasi-efficiency checks.

A point fails local efficiency when a nearby feasible point weakly improves
every objective and strictly improves one; quasi efficiency relaxes each
objective by alpha_i * ||x - x0||.  Locally Lipschitz objectives always admit
such alphas, which is what makes quasi efficiency a consequence of regularity
rather than of optimality; alpha_from_lipschitz constructs them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .funcdsl import DomainSet, PiecewiseFn
from .minima import _margin
from .nonsmooth import local_lipschitz
from .results import FAILS, HOLDS, VACUOUS, SampleCensus, Verdict, Witness
from .sampling import domain_samples, expanding_samples

INF = math.inf


@dataclass(frozen=True)
class AlphaVector:
    """Componentwise-positive relaxation slopes for quasi efficiency."""

    values: tuple

    def __post_init__(self):
        if not self.values:
            raise ValueError("alpha vector must be nonempty")
        if any(a <= 0 for a in self.values):
            raise ValueError("alpha components must be strictly positive")

    @staticmethod
    def of(values, p=None):
        if np.isscalar(values):
            if p is None:
                raise ValueError("scalar alpha needs the objective count")
            return AlphaVector(tuple(float(values) for _ in range(p)))
        return AlphaVector(tuple(float(v) for v in values))

    def __len__(self):
        return len(self.values)

    def as_array(self):
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class VectorProblem:
    """Objectives, inequality constraints g_j <= 0, and a ground set."""

    objectives: tuple
    constraints: tuple
    domain: DomainSet

    def __post_init__(self):
        if not self.objectives:
            raise ValueError("need at least one objective")
        dims = {f.n for f in self.objectives} | {g.n for g in self.constraints}
        dims.add(self.domain.dim)
        if len(dims) != 1:
            raise ValueError(f"dimension mismatch: {dims}")

    @property
    def n(self):
        return self.domain.dim

    @property
    def p(self):
        return len(self.objectives)

    @property
    def m(self):
        return len(self.constraints)

    @staticmethod
    def from_problem_spec(spec):
        return VectorProblem(tuple(spec.objectives), tuple(spec.constraints), spec.domain)

    def feasible_mask(self, pts):
        pts = np.asarray(pts, dtype=float)
        mask = self.domain.contains(pts)
        for g in self.constraints:
            if not np.any(mask):
                break
            vals = np.full(pts.shape[0], INF)
            vals[mask] = g.evaluate_batch(pts[mask])
            mask &= vals <= 0.0
        return mask

    def feasible(self, x):
        return bool(self.feasible_mask(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def objective_values(self, pts):
        return np.stack([f.evaluate_batch(pts) for f in self.objectives], axis=0)


def _local_point_cloud(vp, x0, radius, plan):
    """Shared sample cloud for Lipschitz estimation and the local checks.

    Using one cloud for both makes the constructed alphas certify
    quasi-efficiency on exactly the points they were estimated from.
    """
    samples = domain_samples(vp.domain, plan, center=x0, radius=radius, include=(x0,))
    pts = samples.points
    mask = vp.feasible_mask(pts)
    return pts[mask], samples.census


def _global_cloud(vp, x0, plan):
    chunks = [domain_samples(vp.domain, plan, center=x0, include=(x0,)).points]
    for _, pts in expanding_samples(vp.domain, plan):
        if pts.shape[0]:
            chunks.append(pts)
    pts = np.unique(np.vstack(chunks), axis=0)
    mask = vp.feasible_mask(pts)
    return pts[mask], SampleCensus(lattice=pts.shape[0], total=int(mask.sum()))


def _margins(vp, tol):
    return np.array([_margin(f, tol) for f in vp.objectives])


def _dominance_verdict(vp, x0, pts, census, weak_gap, strict_gap, values_extra, tol):
    """Shared scan: fails when some sample satisfies every weak inequality and
    one strict inequality; the witness maximizes the best strict improvement."""
    x0 = np.asarray(x0, dtype=float)
    if pts.shape[0] == 0:
        return Verdict(VACUOUS, census=census, info={"note": "no feasible samples"})
    F = vp.objective_values(pts)
    margins = _margins(vp, tol)[:, None]
    weak = F <= weak_gap + margins
    strict = F < strict_gap - margins
    mask = np.all(weak, axis=0) & np.any(strict, axis=0)
    tolerance = float(np.max(margins))
    if not np.any(mask):
        return Verdict(HOLDS, census=census, tolerance=tolerance)
    improvement = np.max(strict_gap - F, axis=0)
    ranked = np.where(mask, improvement, -INF)
    best = np.max(ranked)
    tied = np.flatnonzero(ranked == best)
    order = np.lexsort(pts[tied].T[::-1])
    idx = int(tied[order[0]])
    values = {"objectives": [float(v) for v in F[:, idx]]}
    values.update(values_extra(idx))
    witness = Witness(tuple(pts[idx]), values)
    return Verdict(FAILS, witness=witness, census=census, tolerance=tolerance)


def check_efficient(vp, x0, delta=None, plan=None, tol=None):
    """(Local) efficiency: no feasible x in B(x0, delta) may dominate x0.

    delta=None or inf checks the global notion on the expanding-window cloud.
    """
    if plan is None:
        raise ValueError("a SamplePlan is required")
    x0 = np.asarray(x0, dtype=float)
    if not vp.feasible(x0):
        raise ValueError("candidate point is not feasible")
    if delta is not None and not math.isinf(delta):
        if delta <= 0:
            raise ValueError("delta must be positive")
        pts, census = _local_point_cloud(vp, x0, delta, plan)
    else:
        pts, census = _global_cloud(vp, x0, plan)
    fx0 = vp.objective_values(x0.reshape(1, -1))[:, 0:1]
    return _dominance_verdict(
        vp, x0, pts, census,
        weak_gap=fx0, strict_gap=fx0,
        values_extra=lambda i: {"objectives_at_x0": [float(v) for v in fx0[:, 0]]},
        tol=tol,
    )


def check_quasi_efficient(vp, x0, alpha, delta=None, plan=None, tol=None):
    """(Local) quasi efficiency with slopes alpha.

    Fails when some feasible x satisfies f_i(x) <= f_i(x0) - alpha_i ||x - x0||
    for all i, strictly for one.
    """
    if plan is None:
        raise ValueError("a SamplePlan is required")
    if not isinstance(alpha, AlphaVector):
        alpha = AlphaVector.of(alpha, p=vp.p)
    if len(alpha) != vp.p:
        raise ValueError("alpha length must match the objective count")
    x0 = np.asarray(x0, dtype=float)
    if not vp.feasible(x0):
        raise ValueError("candidate point is not feasible")
    if delta is not None and not math.isinf(delta):
        if delta <= 0:
            raise ValueError("delta must be positive")
        pts, census = _local_point_cloud(vp, x0, delta, plan)
    else:
        pts, census = _global_cloud(vp, x0, plan)
    if pts.shape[0] == 0:
        return Verdict(VACUOUS, census=census, info={"note": "no feasible samples"})
    fx0 = vp.objective_values(x0.reshape(1, -1))[:, 0:1]
    dist = np.linalg.norm(pts - x0, axis=1)[None, :]
    floor = fx0 - alpha.as_array()[:, None] * dist
    return _dominance_verdict(
        vp, x0, pts, census,
        weak_gap=floor, strict_gap=floor,
        values_extra=lambda i: {
            "objectives_at_x0": [float(v) for v in fx0[:, 0]],
            "alpha": list(alpha.values),
        },
        tol=tol,
    )


def alpha_from_lipschitz(vp, x0, radius, plan):
    """Relaxation slopes exceeding the sampled local Lipschitz constants.

    Returns (alpha, delta) with alpha_i = 1.1 * L_i + 0.01 and delta the
    common estimation radius; by construction quasi efficiency with these
    slopes holds on the sample cloud the constants were estimated from.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    x0 = np.asarray(x0, dtype=float)
    if not vp.feasible(x0):
        raise ValueError("candidate point is not feasible")
    cloud, _ = _local_point_cloud(vp, x0, radius, plan)
    member = _FeasibleView(vp)
    constants = [
        local_lipschitz(f, x0, radius, plan, domain=member, extra_points=cloud)
        for f in vp.objectives
    ]
    alpha = AlphaVector(tuple(1.1 * L + 0.01 for L in constants))
    return alpha, radius


class _FeasibleView:
    """DomainSet-style membership view of the feasible set of a problem."""

    def __init__(self, vp):
        self._vp = vp
        self.dim = vp.n

    def contains(self, pts):
        return self._vp.feasible_mask(pts)

    def contains_point(self, x):
        return self._vp.feasible(x)
