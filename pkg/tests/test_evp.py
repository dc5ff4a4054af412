import math

import numpy as np
import pytest

from approxmin import parse_function
from approxmin.evp import (
    DescentError,
    PremiseError,
    ekeland_search,
    verify_certificate,
    verify_evp_premise,
)
from approxmin.funcdsl import Box
from approxmin.minima import check_quasi_minimum_alpha

BOX2 = Box(((-2.0, 2.0, True, True),))
BOX3 = Box(((-3.0, 3.0, True, True),))
SJBOX = Box(((-0.5, 1.0, True, True),))

SQUARE = parse_function("n=1; else : x1 ^ 2")
ABS = parse_function("n=1; else : abs(x1)")
SHIFTED = parse_function("n=1; else : abs(x1 - 0.5)")
PWQUAD = parse_function("n=1; else : min((x1 - 1) ^ 2, (x1 + 1) ^ 2 + 0.5)")
STEP = parse_function("n=1; x1 <= 0 : x1 ; else : 1")
LINEAR = parse_function("n=1; else : x1")

CASES = [
    ("parabola", SQUARE, BOX2, [0.5], 0.25, 1.0),
    ("abs", ABS, BOX2, [0.3], 0.3, 0.5),
    ("shifted-abs", SHIFTED, BOX2, [0.3], 0.2, 1.0),
    ("piecewise-quad", PWQUAD, BOX3, [2.0], 1.0, 1.0),
    ("step-jump-box", STEP, SJBOX, [0.0], 0.5, 1.0),
]


def test_premise_holds_near_infimum(plan):
    verdict = verify_evp_premise(SQUARE, BOX2, [0.5], 0.25, plan)
    assert verdict.holds
    assert abs(verdict.info["inf_estimate"]) <= 1e-9


def test_premise_trivial_at_argmin(plan):
    assert verify_evp_premise(SQUARE, BOX2, [0.0], 0.5, plan).holds


def test_premise_fails_far_from_infimum(plan):
    verdict = verify_evp_premise(LINEAR, BOX2, [2.0], 1.0, plan)
    assert verdict.fails  # f(2) = 2 > -2 + 1


def test_premise_checks_standing_hypotheses(plan):
    from approxmin.funcdsl import Full

    verdict = verify_evp_premise(LINEAR, Full(1), [0.0], 1.0, plan)
    assert verdict.fails  # unbounded below
    assert verdict.info["bounded_below"] == "fails"


@pytest.mark.parametrize("name,f,dom,x0,eps,lam", CASES, ids=[c[0] for c in CASES])
def test_certificates_valid_and_reverify(plan, name, f, dom, x0, eps, lam):
    cert = ekeland_search(f, dom, x0, eps, lam, plan)
    assert cert.valid
    assert cert.residual_no_increase <= cert.tolerance
    assert cert.distance <= lam + cert.tolerance
    assert cert.max_violation <= cert.tolerance
    assert verify_certificate(f, dom, cert, plan, resolution_factor=2)


@pytest.mark.parametrize("name,f,dom,x0,eps,lam", CASES, ids=[c[0] for c in CASES])
def test_descent_invariant_along_trace(plan, name, f, dom, x0, eps, lam):
    cert = ekeland_search(f, dom, x0, eps, lam, plan)
    kappa = eps / lam
    for (p0, v0), (p1, v1) in zip(cert.trace, cert.trace[1:]):
        step = float(np.linalg.norm(np.asarray(p1) - np.asarray(p0)))
        assert step > 0
        assert v1 <= v0 - kappa * step + 1e-12


@pytest.mark.parametrize("name,f,dom,x0,eps,lam", CASES, ids=[c[0] for c in CASES])
def test_certified_point_is_slope_relaxed_minimum(plan, name, f, dom, x0, eps, lam):
    cert = ekeland_search(f, dom, x0, eps, lam, plan)
    verdict = check_quasi_minimum_alpha(f, dom, list(cert.x_lambda), eps / lam, plan)
    assert verdict.holds


def test_search_from_exact_minimum_stays_put(plan):
    cert = ekeland_search(SQUARE, BOX2, [0.0], 0.5, 2.0, plan)
    assert cert.x_lambda == (0.0,)
    assert cert.valid
    assert len(cert.trace) == 1


def test_eps_zero_trivial_certificate(plan):
    cert = ekeland_search(SQUARE, BOX2, [0.0], 0.0, 1.0, plan)
    assert cert.valid
    assert cert.x_lambda == (0.0,)
    assert "trivial" in cert.note


def test_eps_zero_requires_minimizer(plan):
    with pytest.raises(PremiseError):
        ekeland_search(SQUARE, BOX2, [0.5], 0.0, 1.0, plan)


def test_all_inf_trivial_certificate(plan):
    f = parse_function("n=1; else : inf")
    cert = ekeland_search(f, BOX2, [0.0], 0.5, 1.0, plan)
    assert cert.valid
    assert "trivial" in cert.note


def test_premise_error_propagates(plan):
    with pytest.raises(PremiseError):
        ekeland_search(LINEAR, BOX2, [2.0], 1.0, 1.0, plan)


def test_trace_is_bounded_by_grid_size(plan):
    cert = ekeland_search(PWQUAD, BOX3, [2.0], 1.0, 1.0, plan)
    assert len(cert.trace) <= cert.grid_points
