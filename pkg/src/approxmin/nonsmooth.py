"""Sampled nonsmooth analysis.

Lower semicontinuity and continuity probes, local Lipschitz estimation,
Clarke generalized directional derivatives and subdifferentials by gradient
sampling, analytic tangent/normal cones of structured convex sets, and the
distance function.  Limit operations are realized as explicit finite
schedules (shrinking ball x shrinking step) with convergence flags, so every
reported number is auditable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .funcdsl import Ball, Box, DomainSet, DomainError, Full, Halfspace, Intersection
from .results import FAILS, HOLDS, SampleCensus, Verdict, Witness
from .sampling import ball_samples, domain_samples

INF = math.inf

# epsilon grid for semicontinuity probes; the floor must stay above
# (max slope) * (final ball radius) or slopes masquerade as jumps
_EPS_GRID = (1e-3, 1e-2, 0.1, 0.25, 0.5, 1.0, 2.0)


class NotLocallyLipschitzError(Exception):
    pass


class UnsupportedConeError(Exception):
    pass


def _stage_points(f, x0, radius, plan, stage, domain=None):
    pts = ball_samples(x0, radius, plan.ball_count, plan, stage=stage)
    if domain is not None:
        pts = pts[domain.contains(pts)]
    return pts


# ---------------------------------------------------------------------------
# Semicontinuity
# ---------------------------------------------------------------------------

def _semicontinuity_check(f, x0, plan, tol, domain, two_sided):
    x0 = np.asarray(x0, dtype=float)
    fx0 = f.evaluate(x0)
    margin = tol if tol is not None else (1e-12 if f.is_piecewise_linear else 1e-9)
    radii = plan.radii()
    total = 0
    worst = None
    for eps0 in _EPS_GRID:
        persistent = True
        candidate = None
        for stage, r in enumerate(radii, start=1):
            pts = _stage_points(f, x0, r, plan, stage, domain)
            total += pts.shape[0]
            if pts.shape[0] == 0:
                persistent = False
                break
            vals = f.evaluate_batch(pts)
            if math.isinf(fx0):
                viol = np.isfinite(vals)
            elif two_sided:
                viol = np.abs(vals - fx0) > eps0 + margin
            else:
                viol = vals < fx0 - eps0 - margin
            if not np.any(viol):
                persistent = False
                break
            i = int(np.argmax(viol))
            candidate = (pts[i], float(vals[i]))
        if persistent and candidate is not None:
            worst = (eps0, candidate)
            break
    census = SampleCensus(ball=total, total=total)
    info = {"eps_grid": list(_EPS_GRID)}
    if math.isinf(fx0):
        info["note"] = "value at the point is +inf; any nearby finite value undercuts"
    if worst is None:
        return Verdict(HOLDS, census=census, tolerance=margin, info=info)
    eps0, (pt, val) = worst
    info["eps_violated"] = eps0
    witness = Witness(tuple(pt), {"f_x": val, "f_x0": fx0, "eps": eps0})
    return Verdict(FAILS, witness=witness, census=census, tolerance=margin, info=info)


def check_lsc(f, x0, plan, tol=None, domain=None):
    """Sampled lower-semicontinuity check at x0.

    Fails only when a drop below f(x0) - eps0 persists across every radius of
    the shrinking schedule for some eps0 on a fixed grid.
    """
    return _semicontinuity_check(f, x0, plan, tol, domain, two_sided=False)


def check_continuity(f, x0, plan, tol=None, domain=None):
    """Two-sided variant of check_lsc; fails at persistent jumps of either sign."""
    return _semicontinuity_check(f, x0, plan, tol, domain, two_sided=True)


# ---------------------------------------------------------------------------
# Local Lipschitz estimation
# ---------------------------------------------------------------------------

def local_lipschitz(f, x, radius, plan, domain=None, extra_points=None):
    """Max sampled difference quotient |f(y)-f(z)| / ||y-z|| on B(x, radius).

    Quotients are taken over all anchor pairs (x plus two ball-sample rings)
    and over anchor-vs-extra pairs, so every extra point is paired with x; the
    result is a lower estimate of the best local Lipschitz constant.  +inf on
    the sampled ball raises NotLocallyLipschitzError.
    """
    x = np.asarray(x, dtype=float)
    anchors = [x.reshape(1, -1)]
    anchors.append(ball_samples(x, radius, max(plan.pair_count, 2 * x.size), plan, stage=0))
    anchors.append(ball_samples(x, radius / 2.0, plan.ball_count, plan, stage=1))
    anchors = np.unique(np.vstack(anchors), axis=0)
    if domain is not None:
        anchors = anchors[domain.contains(anchors)]
    cloud = anchors
    if extra_points is not None and len(extra_points):
        extra = np.asarray(extra_points, dtype=float)
        extra = extra[np.linalg.norm(extra - x, axis=1) < radius]
        if domain is not None and extra.shape[0]:
            extra = extra[domain.contains(extra)]
        if extra.shape[0]:
            cloud = np.vstack([anchors, extra])
    if cloud.shape[0] < 2 or anchors.shape[0] == 0:
        return 0.0
    vals_a = f.evaluate_batch(anchors)
    vals_c = vals_a if cloud is anchors else f.evaluate_batch(cloud)
    if np.any(np.isinf(vals_c)) or np.any(np.isinf(vals_a)):
        raise NotLocallyLipschitzError("function takes +inf on the sampled ball")
    diff = np.abs(vals_a[:, None] - vals_c[None, :])
    dist = np.linalg.norm(anchors[:, None, :] - cloud[None, :, :], axis=2)
    mask = dist > 0
    quotients = np.where(mask, diff / np.where(mask, dist, 1.0), 0.0)
    return float(np.max(quotients))


def _lipschitz_probe(f, x, plan, domain=None):
    """Raise when shrinking-ball Lipschitz estimates diverge."""
    radii = plan.radii()
    idxs = [0, min(6, len(radii) - 1), min(12, len(radii) - 1), min(18, len(radii) - 1)]
    estimates = []
    for i in sorted(set(idxs)):
        estimates.append(local_lipschitz(f, x, radii[i], plan, domain=domain))
    for a, b in zip(estimates, estimates[1:]):
        if b > 3.0 * max(a, 1e-9) and b > 10.0:
            raise NotLocallyLipschitzError(
                f"local Lipschitz estimates diverge on shrinking balls: {estimates}"
            )
    return max(estimates)


# ---------------------------------------------------------------------------
# Clarke generalized directional derivative
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirDerivEstimate:
    """Stage-max difference-quotient estimate of the generalized derivative."""

    value: float
    stage_values: tuple
    converged: bool

    def __float__(self):
        return self.value


def clarke_dirderiv(f, x, v, plan, tol=1e-5, domain=None):
    """limsup of (f(z + t v) - f(z)) / t over z -> x, t -> 0, as a finite schedule.

    Stage k scans z in B(x, delta_k) (plus z = x itself) against quotient steps
    no larger than delta_k / 2; the final stage maximum is reported, with a
    convergence flag set when the last two stage maxima agree within tol.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.all(v == 0.0):
        return DirDerivEstimate(0.0, (), True)
    stage_values = []
    for stage, r in enumerate(plan.radii(), start=1):
        steps = plan.stage_steps(r)
        if not steps:
            continue
        zs = np.vstack([x.reshape(1, -1), _stage_points(f, x, r, plan, stage, domain)])
        fz = f.evaluate_batch(zs)
        if np.any(np.isinf(fz)):
            raise NotLocallyLipschitzError("+inf value inside a sampled ball")
        best = -INF
        for lam in steps:
            shifted = zs + lam * v
            fshift = f.evaluate_batch(shifted)
            if np.any(np.isinf(fshift)):
                raise NotLocallyLipschitzError("+inf value inside a sampled ball")
            q = (fshift - fz) / lam
            best = max(best, float(np.max(q)))
        stage_values.append(best)
    values = tuple(stage_values)
    if len(values) < 2:
        raise ValueError("plan has too few usable stages")
    head = max(abs(v) for v in values[:3])
    tail = max(abs(v) for v in values[-3:])
    if tail > 50.0 * (1.0 + head):
        raise NotLocallyLipschitzError(
            f"difference quotients diverge across stages: {values[-3:]}"
        )
    converged = abs(values[-1] - values[-2]) <= tol
    return DirDerivEstimate(values[-1], values, converged)


# ---------------------------------------------------------------------------
# Clarke subdifferential by gradient sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubdiffApprox:
    """Finite gradient-estimate set whose convex hull approximates the subdifferential."""

    x: tuple
    points: np.ndarray
    radius: float
    fd_step: float
    lipschitz: float

    def support(self, u):
        return float(np.max(self.points @ np.asarray(u, dtype=float)))

    def interval(self):
        if self.points.shape[1] != 1:
            raise ValueError("interval view only for 1-D subdifferentials")
        return float(np.min(self.points)), float(np.max(self.points))

    def min_norm(self):
        from .optcond import min_norm_point

        return float(np.linalg.norm(min_norm_point(self.points)))


def _ring_points(center, radius, count=16):
    angles = 2.0 * math.pi * np.arange(count) / count
    ring = np.stack([np.cos(angles), np.sin(angles)], axis=1) * radius
    return np.asarray(center, dtype=float) + ring


def _gradient_estimates(f, pts, h, agree_tol, domain=None):
    """Central-difference gradients at the sampled points of differentiability.

    A point passes when forward and backward quotients agree within agree_tol
    per coordinate; kink-straddling samples are discarded.
    """
    n = pts.shape[1]
    if domain is not None:
        pts = pts[domain.contains(pts)]
    if pts.shape[0] == 0:
        return np.empty((0, n))
    f0 = f.evaluate_batch(pts)
    grads = np.empty((pts.shape[0], n))
    keep = np.ones(pts.shape[0], dtype=bool)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fp = f.evaluate_batch(pts + e)
        fm = f.evaluate_batch(pts - e)
        fwd = (fp - f0) / h
        back = (f0 - fm) / h
        keep &= np.abs(fwd - back) <= agree_tol
        grads[:, i] = (fp - fm) / (2.0 * h)
    return grads[keep]


def clarke_subdiff(f, x, plan, domain=None, agree_tol=1e-6):
    """Gradient-sampling approximation of the Clarke subdifferential at x.

    Collects central-difference gradients at differentiable samples in the
    shrinking-ball schedule and reports the deepest well-populated stage
    (united with its predecessor for directional coverage).
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    lipschitz = _lipschitz_probe(f, x, plan, domain=domain)
    h = max(1e-7, 1e-7 * float(np.linalg.norm(x)))
    radii = plan.radii()
    per_stage = []
    for stage, r in enumerate(radii, start=1):
        pts = [ball_samples(x, r, plan.ball_count, plan, stage=stage)]
        if n == 2:
            pts.append(_ring_points(x, r / 2.0))
        estimates = _gradient_estimates(f, np.vstack(pts), h, agree_tol, domain)
        per_stage.append(estimates)
    min_keep = max(2 * n, 6)
    populated = [k for k, est in enumerate(per_stage) if est.shape[0] >= min_keep]
    if not populated:
        raise NotLocallyLipschitzError("no stage produced enough differentiable samples")
    k_star = populated[-1]
    blocks = [per_stage[k_star]]
    if k_star > 0:
        blocks.append(per_stage[k_star - 1])
    points = np.unique(np.vstack(blocks), axis=0)
    norms = np.linalg.norm(points, axis=1)
    middle = len(radii) // 2
    early = np.vstack([e for e in per_stage[:middle] if e.shape[0]] or [np.empty((0, n))])
    if early.shape[0] and np.max(norms) > 4.0 * (np.max(np.linalg.norm(early, axis=1)) + 1e-9) \
            and np.max(norms) > 10.0:
        raise NotLocallyLipschitzError("gradient estimates explode across stages")
    return SubdiffApprox(
        x=tuple(x),
        points=points,
        radius=radii[max(0, k_star - 1)],
        fd_step=h,
        lipschitz=lipschitz,
    )


# ---------------------------------------------------------------------------
# Cones
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeRep:
    """Polyhedral cone as canonical unit generator rays (or full / trivial)."""

    dim: int
    kind: str  # "full" | "trivial" | "polyhedral"
    generators: tuple = ()

    @staticmethod
    def full(dim):
        return ConeRep(dim, "full")

    @staticmethod
    def trivial(dim):
        return ConeRep(dim, "trivial")

    @staticmethod
    def polyhedral(dim, rays):
        canon = _canonical_rays(rays)
        if not canon:
            return ConeRep.trivial(dim)
        return ConeRep(dim, "polyhedral", canon)

    @property
    def generator_array(self):
        return np.array(self.generators).reshape(-1, self.dim)

    def contains(self, v, tol=1e-9):
        v = np.asarray(v, dtype=float)
        if self.kind == "full":
            return True
        if self.kind == "trivial":
            return bool(np.linalg.norm(v) <= tol)
        return bool(np.linalg.norm(v - self.project(v)) <= tol * (1 + np.linalg.norm(v)))

    def project(self, y):
        """Euclidean projection onto the cone."""
        from scipy.optimize import nnls

        y = np.asarray(y, dtype=float)
        if self.kind == "full":
            return y
        if self.kind == "trivial":
            return np.zeros_like(y)
        G = self.generator_array.T  # (dim, rays)
        coef, _ = nnls(G, y)
        return G @ coef

    def polar(self):
        """Negative polar cone {d : d.g <= 0 for every generator g}."""
        if self.kind == "full":
            return ConeRep.trivial(self.dim)
        if self.kind == "trivial":
            return ConeRep.full(self.dim)
        return _cone_from_inequalities(self.generator_array, self.dim)


def _canonical_rays(rays, tol=1e-12):
    out = set()
    for ray in np.asarray(rays, dtype=float).reshape(-1, len(rays[0]) if len(rays) else 0):
        norm = np.linalg.norm(ray)
        if norm <= tol:
            continue
        unit = ray / norm
        out.add(tuple(round(float(c), 12) + 0.0 for c in unit))
    return tuple(sorted(out))


def _orthobasis(a):
    """Orthonormal basis of the hyperplane a-perp."""
    a = np.asarray(a, dtype=float)
    n = a.size
    basis = []
    q, _ = np.linalg.qr(np.column_stack([a.reshape(-1, 1), np.eye(n)]))
    for i in range(1, n):
        basis.append(q[:, i])
    return basis


def _cone_from_inequalities(rows, dim, tol=1e-12):
    """Generators of {v : rows @ v <= 0} for the structured cases used here.

    Handles: no rows (full space), axis-aligned rows (coordinate cones in any
    dimension), a single normal direction (halfspace / hyperplane cone), and
    general 2-D sectors.  Anything else is unsupported.
    """
    rows = np.asarray(rows, dtype=float).reshape(-1, dim)
    norms = np.linalg.norm(rows, axis=1)
    rows = rows[norms > tol]
    if rows.shape[0] == 0:
        return ConeRep.full(dim)
    rows = rows / np.linalg.norm(rows, axis=1)[:, None]

    axis_aligned = all(np.sum(np.abs(r) > tol) == 1 for r in rows)
    if axis_aligned:
        lo_block = set()  # coordinates forced <= 0
        hi_block = set()  # coordinates forced >= 0
        for r in rows:
            i = int(np.argmax(np.abs(r)))
            if r[i] > 0:
                lo_block.add(i)
            else:
                hi_block.add(i)
        rays = []
        for i in range(dim):
            e = np.zeros(dim)
            e[i] = 1.0
            if i not in lo_block:
                rays.append(e.copy())
            if i not in hi_block:
                rays.append(-e)
        return ConeRep.polyhedral(dim, rays) if rays else ConeRep.trivial(dim)

    directions = []
    for r in rows:
        if not any(np.linalg.norm(r - d) < 1e-9 or np.linalg.norm(r + d) < 1e-9 for d in directions):
            directions.append(r)
    if len(directions) == 1:
        a = directions[0]
        both = any(np.linalg.norm(r + a) < 1e-9 for r in rows) and any(
            np.linalg.norm(r - a) < 1e-9 for r in rows
        )
        basis = _orthobasis(a)
        rays = [b for b in basis] + [-b for b in basis]
        if not both:
            sign = 1.0 if any(np.linalg.norm(r - a) < 1e-9 for r in rows) else -1.0
            rays.append(-sign * a)
        return ConeRep.polyhedral(dim, rays)

    if dim == 2:
        return _sector_from_inequalities(rows)
    raise UnsupportedConeError("cone structure not supported beyond 2-D sectors")


def _sector_from_inequalities(rows, tol=1e-10):
    """2-D case: the feasible cone of halfplanes through the origin is a sector."""
    candidates = []
    for a in rows:
        rot = np.array([-a[1], a[0]])
        candidates.extend([rot, -rot, -a])
    feasible = []
    for c in candidates:
        norm = np.linalg.norm(c)
        if norm <= tol:
            continue
        u = c / norm
        if np.all(rows @ u <= tol):
            feasible.append(u)
    if not feasible:
        return ConeRep.trivial(2)
    feasible = np.unique(np.round(np.array(feasible), 12), axis=0)
    angles = np.sort(np.mod(np.arctan2(feasible[:, 1], feasible[:, 0]), 2 * math.pi))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2 * math.pi]]))
    widest = int(np.argmax(gaps))
    arc = 2 * math.pi - gaps[widest]
    start = angles[(widest + 1) % len(angles)]
    end = start + arc
    endpoints = [
        np.array([math.cos(start), math.sin(start)]),
        np.array([math.cos(end), math.sin(end)]),
    ]
    if arc <= tol:
        return ConeRep.polyhedral(2, [endpoints[0]])
    rays = endpoints
    if arc >= math.pi - 1e-9:
        mid = (start + end) / 2.0
        rays = rays + [np.array([math.cos(mid), math.sin(mid)])]
    return ConeRep.polyhedral(2, rays)


def _active_rows(domain, x, tol=1e-12):
    """Outward normals of the constraints active at x (closed sets only)."""
    x = np.asarray(x, dtype=float)
    if isinstance(domain, Full):
        return []
    if isinstance(domain, Box):
        rows = []
        for i, (lo, hi, lo_closed, hi_closed) in enumerate(domain.bounds):
            e = np.zeros(domain.dim)
            e[i] = 1.0
            if lo_closed and math.isfinite(lo) and abs(x[i] - lo) <= tol * (1 + abs(lo)):
                rows.append(-e)
            if hi_closed and math.isfinite(hi) and abs(x[i] - hi) <= tol * (1 + abs(hi)):
                rows.append(e.copy())
        return rows
    if isinstance(domain, Halfspace):
        a = np.asarray(domain.a, dtype=float)
        if abs(float(a @ x) - domain.b) <= tol * (1 + abs(domain.b)):
            return [a]
        return []
    if isinstance(domain, Ball):
        c = np.asarray(domain.center, dtype=float)
        r = float(np.linalg.norm(x - c))
        if domain.closed and abs(r - domain.radius) <= tol * (1 + domain.radius):
            return [x - c]
        return []
    if isinstance(domain, Intersection):
        rows = []
        for m in domain.members:
            rows.extend(_active_rows(m, x, tol))
        return rows
    raise UnsupportedConeError(f"unsupported set kind {type(domain).__name__}")


def tangent_cone(domain, x):
    """Tangent cone of a structured convex set at a member point, analytically."""
    if not domain.contains_point(x):
        raise DomainError("point does not belong to the set")
    rows = _active_rows(domain, x)
    return _cone_from_inequalities(np.array(rows).reshape(-1, domain.dim), domain.dim)


def normal_cone(domain, x):
    """Negative polar of the tangent cone, as canonical generator rays."""
    return tangent_cone(domain, x).polar()


# ---------------------------------------------------------------------------
# Distance function
# ---------------------------------------------------------------------------

def distance_fn(domain, y):
    """Distance from y to the set; exact for box/halfspace/ball, alternating
    projection with a residual check for intersections."""
    y = np.asarray(y, dtype=float).reshape(1, -1)
    p = domain.project(y)
    if isinstance(domain, Intersection):
        scale = 1.0 + float(np.linalg.norm(y))
        again = domain.project(p)
        residual = float(np.linalg.norm(again - p))
        closure_gap = max(
            float(np.linalg.norm(m.project(p) - p)) for m in domain.members
        )
        if residual > 1e-7 * scale or closure_gap > 1e-7 * scale:
            raise DomainError("intersection appears empty or separated")
    return float(np.linalg.norm(y - p))
