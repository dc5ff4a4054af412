"""Independent oracles used by the tests.

Everything here is deliberately implemented from first principles (direct
grids, exact geometry, interval arithmetic, golden-section over convex
parametrizations) and shares no numerical machinery with the package code it
checks.
"""

from __future__ import annotations

import math

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# Scalar brute-force verdict oracles
# ---------------------------------------------------------------------------

def brute_has_eps_min_violation(fn, xs, x0, eps, margin=1e-12):
    fx0 = fn(x0)
    return any(fx0 > fn(x) + eps + margin for x in xs)


def brute_has_quasi_violation(fn, xs, x0, slope, margin=1e-12):
    fx0 = fn(x0)
    return any(fx0 > fn(x) + slope * abs(x - x0) + margin for x in xs)


def brute_min(fn, xs):
    return min(fn(x) for x in xs)


def shrinking_ball_inf(fn, x0, radii, per_ball=4001):
    """inf of fn over shrinking balls, by direct dense grids."""
    out = []
    for r in radii:
        xs = np.linspace(x0 - r, x0 + r, per_ball)
        out.append(min(fn(float(x)) for x in xs))
    return out


def pairwise_lipschitz(fn, xs):
    xs = np.asarray(xs, dtype=float)
    vals = np.array([fn(float(x)) for x in xs])
    best = 0.0
    for i in range(len(xs)):
        d = np.abs(xs - xs[i])
        keep = d > 0
        best = max(best, float(np.max(np.abs(vals - vals[i])[keep] / d[keep])))
    return best


def dirderiv_grid_oracle(fn, x0, v, z_half_width=1e-3, steps=None):
    """Max difference quotient over an independent dense (z, step) grid."""
    if steps is None:
        steps = np.logspace(-9, -3, 40)
    zs = np.linspace(x0 - z_half_width, x0 + z_half_width, 801)
    best = -math.inf
    for lam in steps:
        q = (np.array([fn(z + lam * v) for z in zs]) - np.array([fn(z) for z in zs])) / lam
        best = max(best, float(np.max(q)))
    return best


# ---------------------------------------------------------------------------
# Hausdorff distance via support functions
# ---------------------------------------------------------------------------

def support_of_points(points, u):
    return float(np.max(np.asarray(points, dtype=float) @ np.asarray(u, dtype=float)))


def hausdorff_1d(points, lo, hi):
    """Hausdorff distance between conv(points) in R^1 and [lo, hi], exact."""
    pts = np.asarray(points, dtype=float).ravel()
    return max(abs(float(np.min(pts)) - lo), abs(float(np.max(pts)) - hi))


def hausdorff_support_2d(points, support_fn, n_dirs=3600):
    """sup over unit directions of |support(points) - support_fn|."""
    angles = 2.0 * math.pi * np.arange(n_dirs) / n_dirs
    worst = 0.0
    for a in angles:
        u = np.array([math.cos(a), math.sin(a)])
        worst = max(worst, abs(support_of_points(points, u) - support_fn(u)))
    return worst


# ---------------------------------------------------------------------------
# Composite-distance oracles
# ---------------------------------------------------------------------------

def interval_weighted_sum(intervals_weights, radius):
    """1-D: sum_i w_i [a_i, b_i] + radius * [-1, 1] by interval arithmetic."""
    lo = hi = 0.0
    for (a, b), w in intervals_weights:
        pa, pb = w * a, w * b
        lo += min(pa, pb)
        hi += max(pa, pb)
    return lo - radius, hi + radius


def composite_distance_1d(intervals_weights, radius, cone_sign):
    """Exact 1-D composite distance; cone_sign in {0, +1, -1, 'full'}."""
    lo, hi = interval_weighted_sum(intervals_weights, radius)
    if cone_sign == "full":
        return 0.0
    if cone_sign == 1:
        hi = math.inf
    elif cone_sign == -1:
        lo = -math.inf
    if lo <= 0.0 <= hi:
        return 0.0
    return min(abs(lo), abs(hi))


def convex_hull_2d(points):
    """Monotone-chain convex hull, counterclockwise, no package geometry."""
    pts = sorted({(float(p[0]), float(p[1])) for p in points})
    if len(pts) <= 2:
        return [np.array(p) for p in pts]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return [np.array(p) for p in (lower[:-1] + upper[:-1])]


def point_to_polygon_distance(q, hull):
    """Exact distance from q to a convex polygon given as hull vertex list."""
    q = np.asarray(q, dtype=float)
    if len(hull) == 1:
        return float(np.linalg.norm(q - hull[0]))
    if len(hull) == 2:
        return _point_segment(q, hull[0], hull[1])
    inside = True
    k = len(hull)
    for i in range(k):
        a, b = hull[i], hull[(i + 1) % k]
        edge = b - a
        normal = np.array([edge[1], -edge[0]])  # outward for ccw hull
        if np.dot(q - a, normal) > 0:
            inside = False
            break
    if inside:
        return 0.0
    return min(_point_segment(q, hull[i], hull[(i + 1) % k]) for i in range(k))


def _point_segment(q, a, b):
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else float(np.clip((q - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(q - (a + t * ab)))


def _golden_min(fn, lo, hi, iters=120):
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = fn(d)
    return min(fc, fd)


def composite_distance_2d(polytopes, radius, cone_rays):
    """Independent 2-D composite distance.

    Sum the weighted polytopes exactly (pairwise vertex sums, own hull code),
    then minimize the exact point-to-polygon distance over the cone
    coefficients by golden section; the minimand is jointly convex.
    """
    acc = np.zeros((1, 2))
    for vertices, w in polytopes:
        V = np.asarray(vertices, dtype=float).reshape(-1, 2) * w
        acc = (acc[:, None, :] + V[None, :, :]).reshape(-1, 2)
    hull = convex_hull_2d(acc)
    scale = max(float(np.max(np.abs(acc))), radius, 1.0)
    T = 1000.0 * scale

    rays = [np.asarray(r, dtype=float) / np.linalg.norm(r) for r in (cone_rays or [])]
    if not rays:
        base = point_to_polygon_distance(np.zeros(2), hull)
        return max(0.0, base - radius)
    if len(rays) == 1:
        g = rays[0]
        base = _golden_min(
            lambda t: point_to_polygon_distance(-t * g, hull), 0.0, T
        )
        return max(0.0, base - radius)
    if len(rays) == 2:
        g1, g2 = rays

        def inner(t1):
            return _golden_min(
                lambda t2: point_to_polygon_distance(-t1 * g1 - t2 * g2, hull), 0.0, T
            )

        base = _golden_min(inner, 0.0, T, iters=90)
        return max(0.0, base - radius)
    raise ValueError("oracle supports at most two cone rays")


# ---------------------------------------------------------------------------
# Dominance brute scan
# ---------------------------------------------------------------------------

def brute_dominating_point(objectives, xs, x0, alpha=None, margin=1e-12):
    """First x that dominates x0 (componentwise, one strict), or None.

    With alpha, each objective is relaxed by alpha_i * |x - x0| first.
    """
    p = len(objectives)
    f0 = [f(x0) for f in objectives]
    for x in xs:
        d = abs(x - x0)
        floor = [f0[i] - (alpha[i] * d if alpha else 0.0) for i in range(p)]
        vals = [objectives[i](x) for i in range(p)]
        weak = all(vals[i] <= floor[i] + margin for i in range(p))
        strict = any(vals[i] < floor[i] - margin for i in range(p))
        if weak and strict:
            return x
    return None
