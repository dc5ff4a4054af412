"""approxmin: sampled verification of approximate-minimum notions.

Evaluates piecewise-defined extended-real functions, tests relaxed solution
notions against their defining inequalities, audits candidate notions for the
qualification criteria of a weaker minimum, constructs descent certificates,
approximates Clarke subdifferentials by gradient sampling, and checks the
multiplier inclusion of the nonsmooth first-order condition.
"""

__version__ = "0.1.0"

from .funcdsl import (
    Ball,
    Box,
    DomainSet,
    EvaluationError,
    Full,
    Halfspace,
    Intersection,
    ParseError,
    PiecewiseFn,
    evaluate,
    load_problem_spec,
    membership,
    parse_function,
    problem_spec_from_dict,
)
from .results import FAILS, HOLDS, VACUOUS, SampleCensus, Verdict, Witness
from .sampling import SamplePlan, ball_samples, domain_samples, grid_samples

__all__ = [
    "__version__",
    "Ball",
    "Box",
    "DomainSet",
    "EvaluationError",
    "FAILS",
    "Full",
    "HOLDS",
    "Halfspace",
    "Intersection",
    "ParseError",
    "PiecewiseFn",
    "SampleCensus",
    "SamplePlan",
    "VACUOUS",
    "Verdict",
    "Witness",
    "ball_samples",
    "domain_samples",
    "evaluate",
    "grid_samples",
    "load_problem_spec",
    "membership",
    "parse_function",
    "problem_spec_from_dict",
]
