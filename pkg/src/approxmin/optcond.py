"""Fritz John condition residuals via distance-to-a-Minkowski-sum.

The membership target is  sum_i lam_i D_i + sum_j mu_j E_j + r B + N  with
D_i, E_j sampled subdifferential hulls, B the unit ball with radius
r = sum_i lam_i alpha_i, and N a polyhedral normal cone.  The distance from
the origin to that set is computed by a Wolfe-style minimum-norm-point
iteration over the weighted polytope part, alternating against the cone; the
ball is absorbed exactly at the end.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .nonsmooth import ConeRep, clarke_subdiff, normal_cone
from .vectopt import AlphaVector

INF = math.inf


class NonConvergenceError(Exception):
    pass


# ---------------------------------------------------------------------------
# Minimum-norm point in a polytope (Wolfe's algorithm)
# ---------------------------------------------------------------------------

def _affine_min_norm(Q):
    """Min-norm point of the affine hull of rows of Q: weights beta, sum = 1."""
    k = Q.shape[0]
    M = np.zeros((k + 1, k + 1))
    M[:k, :k] = Q @ Q.T
    M[:k, k] = 1.0
    M[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return sol[:k]


def min_norm_point(points, tol=1e-12, max_iter=None):
    """Point of minimum Euclidean norm in the convex hull of the given points."""
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P.reshape(-1, 1)
    m = P.shape[0]
    if m == 0:
        raise ValueError("need at least one point")
    if max_iter is None:
        max_iter = 16 * m + 64
    start = int(np.argmin(np.einsum("ij,ij->i", P, P)))
    corral = [start]
    weights = np.array([1.0])
    x = P[start].astype(float)
    for _ in range(max_iter):
        dots = P @ x
        j = int(np.argmin(dots))
        scale = max(1.0, float(x @ x))
        if dots[j] > x @ x - tol * scale:
            break
        if j in corral:
            break
        corral.append(j)
        weights = np.append(weights, 0.0)
        while True:
            Q = P[corral]
            beta = _affine_min_norm(Q)
            if np.all(beta > tol):
                weights = beta
                x = beta @ Q
                break
            shrinking = weights - beta
            candidates = [
                weights[i] / shrinking[i]
                for i in range(len(beta))
                if beta[i] <= tol and shrinking[i] > tol
            ]
            theta = min(candidates) if candidates else 0.0
            weights = (1.0 - theta) * weights + theta * beta
            weights[weights < tol] = 0.0
            keep = [i for i, w in enumerate(weights) if w > 0.0]
            if not keep:
                keep = [int(np.argmax(beta))]
                weights[keep[0]] = 1.0
            corral = [corral[i] for i in keep]
            weights = weights[keep]
            weights = weights / weights.sum()
            x = weights @ P[corral]
            if len(corral) == 1:
                break
    return x


def project_onto_hull(y, points):
    y = np.asarray(y, dtype=float)
    shifted = np.asarray(points, dtype=float) - y
    return y + min_norm_point(shifted)


# ---------------------------------------------------------------------------
# Composite set distance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompositeDistance:
    value: float
    converged: bool
    iterations: int

    def __float__(self):
        return self.value


def _weighted_sum_vertices(polytopes, dim, cap=2048):
    """Vertex candidates of sum_i w_i conv(V_i): pairwise sums of vertices."""
    acc = np.zeros((1, dim))
    for vertices, weight in polytopes:
        if weight == 0.0:
            continue
        V = np.asarray(vertices, dtype=float).reshape(-1, dim) * weight
        acc = (acc[:, None, :] + V[None, :, :]).reshape(-1, dim)
        if acc.shape[0] > cap:
            acc = _hull_reduce(acc)
    return acc


def _hull_reduce(points):
    if points.shape[1] == 1:
        return np.array([[points.min()], [points.max()]])
    try:
        from scipy.spatial import ConvexHull

        hull = ConvexHull(points, qhull_options="QJ")
        return points[hull.vertices]
    except Exception:
        return points


def composite_set_distance(polytopes, ball_radius, cone, tol=1e-8, max_iter=5000):
    """Distance from the origin to  sum_i w_i conv(V_i) + ball_radius*B + cone.

    polytopes: sequence of (vertex array, weight).  The polytope/cone gap is
    found by alternating the cone projection with a minimum-norm-point step;
    the ball shrinks the result exactly at the end.
    """
    if ball_radius < 0:
        raise ValueError("ball radius must be nonnegative")
    if not polytopes:
        raise ValueError("need at least one polytope")
    dim = np.atleast_2d(np.asarray(polytopes[0][0], dtype=float)).shape[1]
    if isinstance(cone, ConeRep) and cone.kind == "full":
        return CompositeDistance(0.0, True, 0)
    P = _weighted_sum_vertices(polytopes, dim)
    if cone is None or (isinstance(cone, ConeRep) and cone.kind == "trivial"):
        gap = float(np.linalg.norm(min_norm_point(P)))
        return CompositeDistance(max(0.0, gap - ball_radius), True, 1)

    p = P[int(np.argmin(np.einsum("ij,ij->i", P, P)))].astype(float)
    gap_prev = INF
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        c = cone.project(-p)
        p = project_onto_hull(-c, P)
        gap = float(np.linalg.norm(p + c))
        if abs(gap_prev - gap) <= tol * 1e-2 * (1.0 + gap):
            converged = True
            break
        gap_prev = gap
    gap = float(np.linalg.norm(p + cone.project(-p)))
    return CompositeDistance(max(0.0, gap - ball_radius), converged, iterations)


# ---------------------------------------------------------------------------
# Fritz John certificates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FJCertificate:
    """Multipliers with the membership residual and slackness residuals."""

    lam: tuple
    mu: tuple
    alpha: tuple
    residual: float
    slackness: tuple
    converged: bool
    subdiff_radii: tuple = ()
    threshold: float = 1e-4
    searched: int = 0

    def __post_init__(self):
        if any(v < 0 for v in self.lam) or any(v < 0 for v in self.mu):
            raise ValueError("multipliers must be nonnegative")
        if abs(sum(self.lam) + sum(self.mu) - 1.0) > 1e-9:
            raise ValueError("multipliers must be normalized to unit l1 norm")

    @property
    def success(self):
        return self.converged and self.residual <= self.threshold

    def to_dict(self):
        return {
            "lambda": list(self.lam),
            "mu": list(self.mu),
            "alpha": list(self.alpha),
            "residual": self.residual,
            "slackness": list(self.slackness),
            "converged": self.converged,
            "success": self.success,
            "threshold": self.threshold,
            "searched": self.searched,
        }


def _normalize_multipliers(lam, mu):
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if np.any(lam < 0) or np.any(mu < 0):
        raise ValueError("multipliers must be nonnegative")
    total = lam.sum() + mu.sum()
    if total <= 0:
        raise ValueError("multipliers must not all be zero")
    return lam / total, mu / total


def _subdiff_cache(vp, x0, plan):
    subs_f = [clarke_subdiff(f, x0, plan) for f in vp.objectives]
    subs_g = [clarke_subdiff(g, x0, plan) for g in vp.constraints]
    return subs_f, subs_g


def _fj_residual(subs_f, subs_g, lam, mu, alpha, cone):
    polytopes = [(s.points, w) for s, w in zip(subs_f, lam) if w > 0]
    polytopes += [(s.points, w) for s, w in zip(subs_g, mu) if w > 0]
    radius = float(np.dot(lam, alpha.as_array()))
    if not polytopes:
        polytopes = [(np.zeros((1, subs_f[0].points.shape[1])), 1.0)]
    return composite_set_distance(polytopes, radius, cone)


def check_fritz_john(vp, x0, alpha, lam, mu, plan, threshold=1e-4):
    """Membership residual of the multiplier inclusion at a feasible point.

    The alpha-ball term enters analytically; only the objective and constraint
    subdifferentials are sampled.  Slackness residuals mu_j * g_j(x0) are
    reported per constraint.
    """
    x0 = np.asarray(x0, dtype=float)
    if not vp.feasible(x0):
        raise ValueError("candidate point is not feasible")
    if not isinstance(alpha, AlphaVector):
        alpha = AlphaVector.of(alpha, p=vp.p)
    lam, mu = _normalize_multipliers(lam, mu)
    if len(lam) != vp.p or len(mu) != vp.m:
        raise ValueError("multiplier lengths must match the problem")
    subs_f, subs_g = _subdiff_cache(vp, x0, plan)
    cone = normal_cone(vp.domain, x0)
    result = _fj_residual(subs_f, subs_g, lam, mu, alpha, cone)
    gvals = [g.evaluate(x0) for g in vp.constraints]
    slackness = tuple(float(m * gv) for m, gv in zip(mu, gvals))
    return FJCertificate(
        lam=tuple(lam), mu=tuple(mu), alpha=tuple(alpha.values),
        residual=result.value, slackness=slackness, converged=result.converged,
        subdiff_radii=tuple(s.radius for s in subs_f + subs_g),
        threshold=threshold, searched=1,
    )


def _simplex_lattice(d, resolution):
    """All nonnegative integer compositions of `resolution` into d parts, scaled."""
    out = []
    for bars in itertools.combinations(range(resolution + d - 1), d - 1):
        prev = -1
        parts = []
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(resolution + d - 2 - prev)
        out.append(np.array(parts, dtype=float) / resolution)
    # vertices first, then decreasing concentration: cheap successes come early
    out.sort(key=lambda w: (-float(np.max(w)), tuple(-w)))
    return out


def find_multipliers(vp, x0, alpha, plan, threshold=1e-4, resolution=6, refine_rounds=3):
    """Search normalized multipliers minimizing the membership residual.

    Inactive constraints (g_j(x0) < -1e-8) are pinned to mu_j = 0, enforcing
    complementary slackness; the remaining simplex is scanned on a lattice and
    locally refined around the best candidate.
    """
    x0 = np.asarray(x0, dtype=float)
    if not vp.feasible(x0):
        raise ValueError("candidate point is not feasible")
    if not isinstance(alpha, AlphaVector):
        alpha = AlphaVector.of(alpha, p=vp.p)
    subs_f, subs_g = _subdiff_cache(vp, x0, plan)
    cone = normal_cone(vp.domain, x0)
    gvals = np.array([g.evaluate(x0) for g in vp.constraints]) if vp.m else np.empty(0)
    active = [j for j in range(vp.m) if gvals[j] >= -1e-8]
    d = vp.p + len(active)

    def expand(w):
        lam = np.asarray(w[: vp.p], dtype=float)
        mu = np.zeros(vp.m)
        for pos, j in enumerate(active):
            mu[j] = w[vp.p + pos]
        return lam, mu

    def residual_of(w):
        lam, mu = expand(w)
        return _fj_residual(subs_f, subs_g, lam, mu, alpha, cone)

    best_w, best = None, None
    searched = 0
    for w in _simplex_lattice(d, resolution):
        res = residual_of(w)
        searched += 1
        if best is None or res.value < best.value:
            best_w, best = w, res
        if res.value <= threshold and res.converged:
            best_w, best = w, res
            break
    else:
        shrink = 0.3
        for _ in range(refine_rounds):
            if best.value <= threshold and best.converged:
                break
            for w in _simplex_lattice(d, resolution):
                cand = best_w + shrink * (w - best_w)
                cand = np.clip(cand, 0.0, None)
                total = cand.sum()
                if total <= 0:
                    continue
                cand /= total
                res = residual_of(cand)
                searched += 1
                if res.value < best.value:
                    best_w, best = cand, res
            shrink *= 0.3

    lam, mu = expand(best_w)
    lam, mu = _normalize_multipliers(lam, mu)
    slackness = tuple(float(m * gv) for m, gv in zip(mu, gvals))
    return FJCertificate(
        lam=tuple(lam), mu=tuple(mu), alpha=tuple(alpha.values),
        residual=best.value, slackness=slackness, converged=best.converged,
        subdiff_radii=tuple(s.radius for s in subs_f + subs_g),
        threshold=threshold, searched=searched,
    )
