"""Deterministic sample plans: shrinking balls, domain lattices, window schedules.

Randomness is counter-based: every coordinate is a pure hash of
(seed, stage, index, coordinate), so the sample set cannot depend on
evaluation order and identical plans reproduce bit-identical transcripts.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .results import SampleCensus

_MASK = (1 << 64) - 1
_TAG_BALL = 0xB1
_TAG_GAUSS = 0xB2
_TAG_RADIUS = 0xB3


def _splitmix64(z):
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _key(*parts):
    h = 0x6A09E667F3BCC909
    for p in parts:
        h = _splitmix64(h ^ (int(p) & _MASK))
    return h


def _uniform(*parts):
    """Deterministic uniform in [0, 1) keyed by the integer parts."""
    return _key(*parts) / 2.0 ** 64


def _gaussian(*parts):
    u1 = max(_uniform(*parts, 0), 2.0 ** -64)
    u2 = _uniform(*parts, 1)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


def _splitmix64_vec(z):
    with np.errstate(over="ignore"):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        return z ^ (z >> np.uint64(31))


def _key_vec(*parts):
    """Vectorized fold identical to _key; parts broadcast as uint64 arrays."""
    h = np.uint64(0x6A09E667F3BCC909)
    out = None
    for p in parts:
        p = np.asarray(p, dtype=np.uint64)
        out = _splitmix64_vec((h if out is None else out) ^ p)
    return out


def _uniform_vec(*parts):
    return _key_vec(*parts) / 2.0 ** 64


def _gaussian_vec(*parts):
    u1 = np.maximum(_uniform_vec(*parts, np.uint64(0)), 2.0 ** -64)
    u2 = _uniform_vec(*parts, np.uint64(1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


@dataclass(frozen=True)
class SamplePlan:
    """Value-typed description of every sample schedule used by the checkers.

    radii: delta_k = delta0 * ratio^k for k = 1..stages (strictly decreasing).
    steps: difference-quotient steps 2^-j; each stage uses the step_spread
    largest steps not exceeding half its radius.
    """

    seed: int = 12345
    stages: int = 20
    delta0: float = 1.0
    ratio: float = 0.5
    ball_count: int = 24
    pair_count: int = 48
    grid_res: int = 241
    max_grid_points: int = 6000
    window: float = 10.0
    expand_stages: int = 12
    step_spread: int = 6

    def __post_init__(self):
        if not (0.0 < self.ratio < 1.0):
            raise ValueError("ratio must lie in (0, 1)")
        if self.delta0 <= 0 or self.stages < 2:
            raise ValueError("need delta0 > 0 and at least two stages")

    def radii(self):
        return tuple(self.delta0 * self.ratio ** k for k in range(1, self.stages + 1))

    def steps(self):
        return tuple(2.0 ** -j for j in range(1, self.stages + self.step_spread + 1))

    def stage_steps(self, radius):
        """Largest step_spread quotient steps that are <= radius / 2."""
        chosen = [s for s in self.steps() if s <= radius / 2.0]
        return tuple(chosen[: self.step_spread])

    def with_seed(self, seed):
        return replace(self, seed=seed)

    def to_dict(self):
        return {
            "seed": self.seed,
            "stages": self.stages,
            "delta0": self.delta0,
            "ratio": self.ratio,
            "ball_count": self.ball_count,
            "pair_count": self.pair_count,
            "grid_res": self.grid_res,
            "max_grid_points": self.max_grid_points,
            "window": self.window,
            "expand_stages": self.expand_stages,
            "step_spread": self.step_spread,
        }


def ball_samples(center, radius, count, plan, stage=0):
    """Points strictly inside the open ball B(center, radius).

    The first points are the deterministic axis points center +- (radius/2) e_i;
    the rest are counter-based pseudo-uniform ball points.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    if count < 1:
        raise ValueError("count must be at least 1")
    center = np.asarray(center, dtype=float)
    n = center.size
    pts = []
    for i in range(n):
        for sign in (1.0, -1.0):
            if len(pts) == count:
                break
            p = center.copy()
            p[i] += sign * radius / 2.0
            pts.append(p)
    start = len(pts)
    m = count - start
    if m > 0:
        idx = np.arange(start, count, dtype=np.uint64).reshape(-1, 1)
        coords = np.arange(n, dtype=np.uint64).reshape(1, -1)
        g = _gaussian_vec(np.uint64(plan.seed), np.uint64(_TAG_GAUSS),
                          np.uint64(stage), idx, coords)
        gnorm = np.linalg.norm(g, axis=1, keepdims=True)
        bad = gnorm[:, 0] <= 1e-300
        if np.any(bad):
            g[bad] = 0.0
            g[bad, 0] = 1.0
            gnorm = np.linalg.norm(g, axis=1, keepdims=True)
        u = _uniform_vec(np.uint64(plan.seed), np.uint64(_TAG_RADIUS),
                         np.uint64(stage), idx[:, 0])
        r = radius * (u ** (1.0 / n)) * (1.0 - 1e-12)
        pts.extend(center + r[:, None] * (g / gnorm))
    return np.array(pts)


def grid_samples(domain, resolution, bounds):
    """Regular lattice on the bounds box, filtered by exact membership.

    Returns (points, vacuous) where vacuous marks an empty intersection; a
    vacuous result must surface in the verdict, never silently pass.
    """
    lo, hi = (np.asarray(b, dtype=float) for b in bounds)
    if np.any(~np.isfinite(lo)) or np.any(~np.isfinite(hi)):
        raise ValueError("grid bounds must be finite")
    if np.any(lo > hi):
        return np.empty((0, lo.size)), True
    if np.isscalar(resolution) or isinstance(resolution, int):
        resolution = [int(resolution)] * lo.size
    axes = [np.linspace(lo[i], hi[i], max(2, resolution[i])) for i in range(lo.size)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    mask = domain.contains(pts)
    pts = pts[mask]
    return pts, pts.shape[0] == 0


def _axis_resolution(plan, n):
    if n == 1:
        return plan.grid_res
    per_axis = int(plan.max_grid_points ** (1.0 / n))
    return max(5, min(plan.grid_res, per_axis))


def _clip_bounds(domain, plan, center=None, radius=None):
    lo, hi = domain.bounding_box()
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    if center is not None and radius is not None and math.isfinite(radius):
        c = np.asarray(center, dtype=float)
        lo = np.maximum(lo, c - radius)
        hi = np.minimum(hi, c + radius)
    anchor = np.zeros(lo.size) if center is None else np.asarray(center, dtype=float)
    lo = np.where(np.isfinite(lo), lo, anchor - plan.window)
    hi = np.where(np.isfinite(hi), hi, anchor + plan.window)
    return lo, hi


@dataclass(frozen=True)
class SampleSet:
    points: np.ndarray
    census: SampleCensus
    vacuous: bool

    def transcript_hash(self):
        return hashlib.sha256(np.ascontiguousarray(self.points).tobytes()).hexdigest()


def domain_samples(domain, plan, center=None, radius=None, include=()):
    """Lattice-plus-shrinking-ball sample cloud for one check.

    center/radius restrict to the open ball B(center, radius); the candidate
    points in ``include`` are appended when they belong to the domain.  Points
    are deduplicated and lexicographically sorted, so the cloud is a pure
    function of (domain, plan, arguments).
    """
    n = domain.dim
    lo, hi = _clip_bounds(domain, plan, center, radius)
    chunks = []
    lattice_count = 0
    if np.all(lo <= hi):
        res = _axis_resolution(plan, n)
        lattice, _ = grid_samples(domain, res, (lo, hi))
        if radius is not None and math.isfinite(radius) and center is not None:
            d = np.linalg.norm(lattice - np.asarray(center, dtype=float), axis=1)
            lattice = lattice[d < radius]
        lattice_count = lattice.shape[0]
        if lattice_count:
            chunks.append(lattice)
    ball_count = 0
    if center is not None:
        if radius is None or not math.isfinite(radius):
            ball_radii = plan.radii()
        else:
            ball_radii = tuple(
                radius * plan.ratio ** j for j in range(1, min(plan.stages, 12) + 1)
            )
        for stage, r in enumerate(ball_radii, start=1):
            pts = ball_samples(center, r, plan.ball_count, plan, stage=stage)
            mask = domain.contains(pts)
            if radius is not None and math.isfinite(radius):
                d = np.linalg.norm(pts - np.asarray(center, dtype=float), axis=1)
                mask &= d < radius
            pts = pts[mask]
            ball_count += pts.shape[0]
            if pts.shape[0]:
                chunks.append(pts)
    for p in include:
        p = np.asarray(p, dtype=float).reshape(1, -1)
        if domain.contains(p)[0]:
            chunks.append(p)
    if not chunks:
        return SampleSet(np.empty((0, n)), SampleCensus(0, 0, 0), True)
    pts = np.unique(np.vstack(chunks), axis=0)
    census = SampleCensus(lattice=lattice_count, ball=ball_count, total=pts.shape[0])
    return SampleSet(pts, census, pts.shape[0] == 0)


def expanding_samples(domain, plan):
    """Window-doubling lattice schedule for finite-lower-bound style checks.

    Yields (half_width, points) per stage; bounded domains stabilize once the
    window covers them.
    """
    n = domain.dim
    out = []
    for t in range(plan.expand_stages + 1):
        w = 2.0 ** t
        lo, hi = domain.bounding_box()
        lo = np.maximum(np.asarray(lo, dtype=float), -w)
        hi = np.minimum(np.asarray(hi, dtype=float), w)
        if np.any(lo > hi):
            out.append((w, np.empty((0, n))))
            continue
        res = _axis_resolution(plan, n)
        pts, _ = grid_samples(domain, res, (lo, hi))
        out.append((w, pts))
    return out
