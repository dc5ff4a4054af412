import math

import numpy as np
import pytest

import oracles
from approxmin import parse_function
from approxmin.funcdsl import Ball, Box, DomainError, Full, Halfspace, Intersection
from approxmin.nonsmooth import (
    ConeRep,
    NotLocallyLipschitzError,
    UnsupportedConeError,
    check_continuity,
    check_lsc,
    clarke_dirderiv,
    clarke_subdiff,
    distance_fn,
    local_lipschitz,
    normal_cone,
    tangent_cone,
)

SPIKE = parse_function("n=1; x1 >= 0 and x1 <= 0 : 1 ; else : 0")
STEP = parse_function("n=1; x1 <= 0 : x1 ; else : 1")
ABS = parse_function("n=1; else : abs(x1)")
NEG_ABS = parse_function("n=1; else : 0 - abs(x1)")
NEG_SQRT = parse_function("n=1; x1 >= 0 : 0 - sqrt(x1) ; else : 0 - x1")
SQUARE = parse_function("n=1; else : x1 ^ 2")
MAXS = parse_function("n=1; else : max(x1, 2 * x1)")
NORM2 = parse_function("n=2; else : norm(x1, x2)")
CONST = parse_function("n=1; else : 0")


# ---------------------------------------------------------------------------
# lower semicontinuity / continuity
# ---------------------------------------------------------------------------

def test_lsc_fails_on_spike(plan):
    verdict = check_lsc(SPIKE, [0.0], plan)
    assert verdict.fails
    x = verdict.witness.point[0]
    assert x != 0.0
    assert SPIKE.evaluate([x]) < SPIKE.evaluate([0.0]) - verdict.info["eps_violated"]


def test_lsc_holds_on_constant(plan):
    assert check_lsc(CONST, [0.3], plan).holds


def test_lsc_holds_on_step_jump(plan):
    # independent oracle: inf over shrinking balls tends to f(0) = 0
    fn = lambda x: x if x <= 0 else 1.0
    infs = oracles.shrinking_ball_inf(fn, 0.0, [0.5 ** k for k in range(1, 12)])
    assert all(later >= earlier for earlier, later in zip(infs, infs[1:]))
    assert infs[-1] > -1e-3
    assert check_lsc(STEP, [0.0], plan).holds


def test_lsc_at_inf_point_reported_specially(plan):
    # finite value at the point, +inf around it: nothing undercuts
    f = parse_function("n=1; x1 >= 0 and x1 <= 0 : 1 ; else : inf")
    assert check_lsc(f, [0.0], plan).holds
    # +inf at the point, finite values arbitrarily close: fails, with a note
    f2 = parse_function("n=1; x1 < 0 : 0 ; x1 > 0 : 0 ; else : inf")
    verdict = check_lsc(f2, [0.0], plan)
    assert verdict.fails
    assert "note" in verdict.info


def test_continuity_fails_on_step_jump_but_lsc_holds(plan):
    assert check_continuity(STEP, [0.0], plan).fails
    assert check_lsc(STEP, [0.0], plan).holds


def test_continuity_holds_on_neg_sqrt(plan):
    assert check_continuity(NEG_SQRT, [0.0], plan).holds
    assert check_lsc(NEG_SQRT, [0.0], plan).holds


# ---------------------------------------------------------------------------
# local Lipschitz estimation
# ---------------------------------------------------------------------------

def test_lipschitz_of_step_on_left_branch(plan):
    # pairwise quotient oracle on an independent grid
    fn = lambda x: x if x <= 0 else 1.0
    oracle = oracles.pairwise_lipschitz(fn, np.linspace(-1.49, -0.51, 101))
    assert oracle == 1.0
    est = local_lipschitz(STEP, [-1.0], 0.5, plan)
    assert abs(est - 1.0) <= 1e-9


def test_lipschitz_of_constant_is_zero(plan):
    assert local_lipschitz(CONST, [0.0], 0.5, plan) == 0.0


def test_lipschitz_of_abs_at_kink(plan):
    oracle = oracles.pairwise_lipschitz(abs, np.linspace(-0.5, 0.5, 101))
    assert oracle == 1.0
    est = local_lipschitz(ABS, [0.0], 0.5, plan)
    assert abs(est - 1.0) <= 1e-9


def test_lipschitz_converges_as_radius_shrinks(plan):
    values = [local_lipschitz(ABS, [0.0], r, plan) for r in (0.5, 0.1, 0.01, 1e-4)]
    assert all(abs(v - 1.0) <= 1e-9 for v in values)


def test_lipschitz_error_on_inf_values(plan):
    f = parse_function("n=1; x1 <= 0 : x1 ; else : inf")
    with pytest.raises(NotLocallyLipschitzError):
        local_lipschitz(f, [0.0], 0.5, plan)


# ---------------------------------------------------------------------------
# Clarke generalized directional derivative
# ---------------------------------------------------------------------------

def test_dirderiv_abs_both_directions(plan):
    oracle = oracles.dirderiv_grid_oracle(abs, 0.0, 1.0)
    assert abs(oracle - 1.0) <= 1e-9
    est = clarke_dirderiv(ABS, [0.0], [1.0], plan)
    assert abs(est.value - 1.0) <= 1e-6
    assert est.converged
    est_neg = clarke_dirderiv(ABS, [0.0], [-1.0], plan)
    assert abs(est_neg.value - 1.0) <= 1e-6


def test_dirderiv_linear_is_exact(plan):
    f = parse_function("n=1; else : 3 * x1")
    for v in (-2.0, 0.5, 1.0):
        assert clarke_dirderiv(f, [0.7], [v], plan).value == 3.0 * v


def test_dirderiv_neg_abs_attains_one_from_left(plan):
    oracle = oracles.dirderiv_grid_oracle(lambda x: -abs(x), 0.0, 1.0)
    assert abs(oracle - 1.0) <= 1e-9
    est = clarke_dirderiv(NEG_ABS, [0.0], [1.0], plan)
    assert abs(est.value - 1.0) <= 1e-6


def test_dirderiv_smooth_point(plan):
    est = clarke_dirderiv(SQUARE, [1.0], [1.0], plan)
    assert abs(est.value - 2.0) <= 1e-4
    assert est.converged


def test_dirderiv_positive_homogeneity(plan):
    # exact at kinks of piecewise-linear functions; the smooth case carries a
    # discretization bias of (final step) * s * (s - 1), so scales stay small
    cases = [(ABS, [0.0], (0.5, 2.0, 3.75)), (MAXS, [0.0], (0.5, 2.0, 3.75)),
             (SQUARE, [0.5], (0.5, 2.0))]
    for f, x, scales in cases:
        base_pos = clarke_dirderiv(f, x, [1.0], plan).value
        base_neg = clarke_dirderiv(f, x, [-1.0], plan).value
        for s in scales:
            assert abs(clarke_dirderiv(f, x, [s], plan).value - s * base_pos) <= 1e-6
            assert abs(clarke_dirderiv(f, x, [-s], plan).value - s * base_neg) <= 1e-6


def test_dirderiv_subadditivity_at_kinks(plan):
    cases = [
        (ABS, [0.0], 1.0, -2.0),
        (MAXS, [0.0], 1.0, -1.0),
        (MAXS, [0.0], 2.0, -0.5),
    ]
    for f, x, u, v in cases:
        huv = clarke_dirderiv(f, x, [u + v], plan).value
        hu = clarke_dirderiv(f, x, [u], plan).value
        hv = clarke_dirderiv(f, x, [v], plan).value
        assert huv <= hu + hv + 1e-4


def test_dirderiv_subadditivity_norm2d(plan):
    u = np.array([1.0, 0.0])
    v = np.array([0.0, 1.0])
    huv = clarke_dirderiv(NORM2, [0.0, 0.0], u + v, plan).value
    hu = clarke_dirderiv(NORM2, [0.0, 0.0], u, plan).value
    hv = clarke_dirderiv(NORM2, [0.0, 0.0], v, plan).value
    assert huv <= hu + hv + 1e-4
    assert abs(huv - math.sqrt(2.0)) <= 1e-6


def test_dirderiv_divergence_signals_not_lipschitz(plan):
    with pytest.raises(NotLocallyLipschitzError):
        clarke_dirderiv(NEG_SQRT, [0.0], [-1.0], plan)


def test_dirderiv_zero_direction(plan):
    assert clarke_dirderiv(ABS, [0.0], [0.0], plan).value == 0.0


# ---------------------------------------------------------------------------
# Clarke subdifferential
# ---------------------------------------------------------------------------

def test_subdiff_abs_hull(plan):
    approx = clarke_subdiff(ABS, [0.0], plan)
    assert oracles.hausdorff_1d(approx.points, -1.0, 1.0) <= 0.05
    assert approx.points.shape[0] >= 2


def test_subdiff_smooth_singleton(plan):
    approx = clarke_subdiff(SQUARE, [1.0], plan)
    lo, hi = approx.interval()
    assert abs(lo - 2.0) <= 1e-4 and abs(hi - 2.0) <= 1e-4


def test_subdiff_max_slopes_hull(plan):
    approx = clarke_subdiff(MAXS, [0.0], plan)
    assert oracles.hausdorff_1d(approx.points, 1.0, 2.0) <= 0.05


def test_subdiff_norm2d_unit_disk(plan):
    approx = clarke_subdiff(NORM2, [0.0, 0.0], plan)
    gap = oracles.hausdorff_support_2d(approx.points, lambda u: 1.0)
    assert gap <= 0.05


def test_subdiff_estimates_bounded_by_lipschitz(plan):
    for f, x in ((ABS, [0.0]), (MAXS, [0.0]), (SQUARE, [1.0])):
        approx = clarke_subdiff(f, x, plan)
        norms = np.linalg.norm(approx.points, axis=1)
        assert np.max(norms) <= approx.lipschitz + 1e-6


def test_subdiff_consistent_with_dirderiv(plan):
    # every hull element d satisfies d.v <= h(x; v) + tol on probe directions
    for f, x, dirs in (
        (ABS, [0.0], [[1.0], [-1.0]]),
        (MAXS, [0.0], [[1.0], [-1.0]]),
        (NORM2, [0.0, 0.0],
         [[math.cos(2 * math.pi * k / 16), math.sin(2 * math.pi * k / 16)] for k in range(16)]),
    ):
        approx = clarke_subdiff(f, x, plan)
        for v in dirs:
            h = clarke_dirderiv(f, x, v, plan).value
            assert approx.support(v) <= h + 1e-3


def test_subdiff_not_lipschitz_raises(plan):
    with pytest.raises(NotLocallyLipschitzError):
        clarke_subdiff(NEG_SQRT, [0.0], plan)
    with pytest.raises(NotLocallyLipschitzError):
        clarke_subdiff(STEP, [0.0], plan)


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

def test_tangent_normal_halfline():
    ray = Box(((0.0, math.inf, True, True),))
    t = tangent_cone(ray, [0.0])
    assert t.generators == ((1.0,),)
    n = normal_cone(ray, [0.0])
    assert n.generators == ((-1.0,),)


def test_interior_point_cones():
    box = Box(((0.0, 1.0, True, True),))
    assert tangent_cone(box, [0.5]).kind == "full"
    assert normal_cone(box, [0.5]).kind == "trivial"


def test_box_corner_cones():
    box = Box(((0.0, 1.0, True, True), (0.0, 1.0, True, True)))
    t = tangent_cone(box, [0.0, 0.0])
    assert t.generators == ((0.0, 1.0), (1.0, 0.0))
    n = normal_cone(box, [0.0, 0.0])
    assert n.generators == ((-1.0, 0.0), (0.0, -1.0))


def test_halfspace_boundary_cones():
    hs = Halfspace((1.0, 1.0), 0.0)
    n = normal_cone(hs, [0.0, 0.0])
    expected = 1.0 / math.sqrt(2.0)
    assert n.kind == "polyhedral"
    assert np.allclose(n.generator_array, [[expected, expected]], atol=1e-12)
    t = tangent_cone(hs, [0.0, 0.0])
    # halfplane tangent cone needs an interior generator besides the boundary
    assert t.generator_array.shape[0] == 3


def test_ball_boundary_cone():
    ball = Ball((0.0, 0.0), 1.0, closed=True)
    n = normal_cone(ball, [1.0, 0.0])
    assert np.allclose(n.generator_array, [[1.0, 0.0]], atol=1e-12)


def test_polar_of_polar_identity():
    cones = [
        tangent_cone(Box(((0.0, math.inf, True, True),)), [0.0]),
        tangent_cone(Box(((0.0, 1.0, True, True), (0.0, 1.0, True, True))), [0.0, 0.0]),
        tangent_cone(Halfspace((1.0, 2.0), 0.0), [0.0, 0.0]),
        tangent_cone(Box(((0.0, 1.0, True, True),) * 3), [0.0, 0.0, 0.0]),
        ConeRep.full(2),
        ConeRep.trivial(2),
    ]
    for cone in cones:
        assert cone.polar().polar() == cone


def test_normal_cone_ball_intersection_invariance(plan):
    domains_points = [
        (Box(((0.0, math.inf, True, True),)), [0.0]),
        (Box(((0.0, 1.0, True, True), (0.0, 1.0, True, True))), [0.0, 0.0]),
        (Halfspace((1.0, -1.0), 0.0), [0.5, 0.5]),
        (Ball((0.0, 0.0), 2.0, closed=True), [2.0, 0.0]),
        (Full(2), [0.3, -0.4]),
    ]
    for domain, x in domains_points:
        base = normal_cone(domain, x)
        for delta in (0.1, 1.0, 10.0):
            shrunk = normal_cone(domain.intersect_ball(x, delta), x)
            assert shrunk == base


def test_cone_project_and_contains():
    cone = ConeRep.polyhedral(2, [(1.0, 0.0), (0.0, 1.0)])
    assert cone.contains([2.0, 3.0])
    assert not cone.contains([-1.0, 0.5])
    proj = cone.project(np.array([-1.0, 2.0]))
    assert np.allclose(proj, [0.0, 2.0], atol=1e-12)


def test_unsupported_cone_raises():
    # three non-axis rows in 3-D exceed the supported structure
    hs1 = Halfspace((1.0, 1.0, 0.0), 0.0)
    hs2 = Halfspace((1.0, 0.0, 1.0), 0.0)
    dom = Intersection((hs1, hs2))
    with pytest.raises(UnsupportedConeError):
        tangent_cone(dom, [0.0, 0.0, 0.0])


# ---------------------------------------------------------------------------
# distance function
# ---------------------------------------------------------------------------

def test_distance_to_interval():
    box = Box(((0.0, 1.0, True, True),))
    assert distance_fn(box, [2.0]) == 1.0
    assert distance_fn(box, [0.5]) == 0.0


def test_distance_to_halfspace_formula():
    rng = np.random.default_rng(99)
    for _ in range(25):
        a = rng.normal(size=2)
        while np.linalg.norm(a) < 0.1:
            a = rng.normal(size=2)
        b = float(rng.normal())
        y = rng.normal(size=2) * 3
        hs = Halfspace(tuple(a), b)
        expected = max(0.0, (a @ y - b) / np.linalg.norm(a))
        assert abs(distance_fn(hs, y) - expected) <= 1e-12


def test_distance_intersection_alternating():
    # box and halfspace whose intersection is the left half of the box
    box = Box(((-1.0, 1.0, True, True), (-1.0, 1.0, True, True)))
    hs = Halfspace((1.0, 0.0), 0.0)
    dom = Intersection((box, hs))
    assert abs(distance_fn(dom, [2.0, 0.0]) - 2.0) <= 1e-9
    assert distance_fn(dom, [-0.5, 0.0]) == 0.0


def test_distance_empty_intersection_raises():
    left = Halfspace((-1.0,), 0.0)   # x >= 0
    right = Halfspace((1.0,), -1.0)  # x <= -1
    with pytest.raises(DomainError):
        distance_fn(Intersection((left, right)), [0.5])
