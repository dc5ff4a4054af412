"""Named fixtures and the corpus runner.

Each fixture is a problem-spec document bundling functions, a domain,
candidate points, parameter bindings, and the expected verdict statuses of
named operations; running the corpus re-executes every expectation and any
mismatch names the fixture and operation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import evp, minima, nonsmooth, optcond, vectopt
from .funcdsl import ProblemSpec, problem_spec_from_dict
from .vectopt import AlphaVector, VectorProblem


@dataclass(frozen=True)
class Fixture:
    spec: ProblemSpec

    @property
    def name(self):
        return self.spec.name

    @property
    def is_scalar(self):
        return self.spec.is_scalar

    def candidate(self, idx):
        return np.asarray(self.spec.candidates[idx], dtype=float)

    def vector_problem(self):
        return VectorProblem.from_problem_spec(self.spec)


def default_corpus_dir():
    return Path(str(resources.files("approxmin") / "corpus"))


def load_corpus(corpus_dir=None):
    """Load all fixtures in a corpus directory, sorted by name."""
    directory = Path(corpus_dir) if corpus_dir else default_corpus_dir()
    fixtures = []
    for path in sorted(directory.glob("*.json")):
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        fixtures.append(Fixture(problem_spec_from_dict(doc, name=path.stem)))
    if not fixtures:
        raise FileNotFoundError(f"no fixtures found in {directory}")
    return fixtures


def load_fixture(name, corpus_dir=None):
    for fixture in load_corpus(corpus_dir):
        if fixture.name == name:
            return fixture
    raise KeyError(f"no fixture named {name!r}")


def _param(expect_params, fixture, key, default=None):
    if key in expect_params:
        return expect_params[key]
    if key in fixture.spec.params:
        return fixture.spec.params[key]
    return default


def _status(verdict):
    return verdict.status


def _run_scalar(op):
    def runner(fixture, candidate_idx, params, plan):
        f = fixture.spec.objective
        domain = fixture.spec.domain
        x0 = fixture.candidate(candidate_idx)
        if op == "check_usual_minimum":
            return _status(minima.check_usual_minimum(f, domain, x0, plan))
        if op == "check_eps_minimum":
            eps = float(_param(params, fixture, "eps"))
            return _status(minima.check_eps_minimum(f, domain, x0, eps, plan))
        if op == "check_eps_quasi_minimum":
            eps = float(_param(params, fixture, "eps"))
            return _status(minima.check_eps_quasi_minimum(f, domain, x0, eps, plan))
        if op == "check_quasi_minimum_alpha":
            alpha = float(_param(params, fixture, "alpha"))
            return _status(minima.check_quasi_minimum_alpha(f, domain, x0, alpha, plan))
        if op == "check_regular_approx":
            eps = float(_param(params, fixture, "eps"))
            return _status(minima.check_regular_approx(f, domain, x0, eps, plan))
        if op == "check_bounded_below":
            return _status(minima.check_bounded_below(f, domain, plan))
        if op == "check_lsc":
            return _status(nonsmooth.check_lsc(f, x0, plan, domain=domain))
        if op == "check_continuity":
            return _status(nonsmooth.check_continuity(f, x0, plan, domain=domain))
        if op == "check_wgm_condition_iv":
            return _status(minima.check_wgm_condition_iv(f, x0, plan, domain=domain))
        if op == "check_local_variant":
            notion = minima.NotionId(
                tag=params["notion"],
                eps=_param(params, fixture, "eps"),
                alpha=_param(params, fixture, "alpha"),
            )
            delta = _param(params, fixture, "delta")
            verdict = minima.check_local_variant(notion, f, domain, x0, delta, plan)
            return _status(verdict)
        if op == "verify_evp_premise":
            eps = float(_param(params, fixture, "eps"))
            return _status(evp.verify_evp_premise(f, domain, x0, eps, plan))
        if op == "ekeland_search":
            eps = float(_param(params, fixture, "eps"))
            lam = float(_param(params, fixture, "lambda", 1.0))
            cert = evp.ekeland_search(f, domain, x0, eps, lam, plan)
            return "valid" if cert.valid else "invalid"
        raise KeyError(op)

    return runner


def _run_vector(op):
    def runner(fixture, candidate_idx, params, plan):
        vp = fixture.vector_problem()
        x0 = fixture.candidate(candidate_idx)
        if op == "check_efficient":
            delta = _param(params, fixture, "delta")
            return _status(vectopt.check_efficient(vp, x0, delta, plan))
        if op == "check_quasi_efficient":
            alpha = AlphaVector.of(_param(params, fixture, "alpha"), p=vp.p)
            delta = _param(params, fixture, "delta")
            return _status(vectopt.check_quasi_efficient(vp, x0, alpha, delta, plan))
        if op == "quasi_efficient_with_lipschitz_alpha":
            radius = float(_param(params, fixture, "radius", 0.5))
            alpha, delta = vectopt.alpha_from_lipschitz(vp, x0, radius, plan)
            return _status(vectopt.check_quasi_efficient(vp, x0, alpha, delta, plan))
        if op == "find_multipliers":
            alpha = AlphaVector.of(_param(params, fixture, "alpha"), p=vp.p)
            cert = optcond.find_multipliers(vp, x0, alpha, plan)
            return "success" if cert.success else "failure"
        if op == "find_multipliers_with_lipschitz_alpha":
            radius = float(_param(params, fixture, "radius", 0.5))
            alpha, _ = vectopt.alpha_from_lipschitz(vp, x0, radius, plan)
            cert = optcond.find_multipliers(vp, x0, alpha, plan)
            return "success" if cert.success else "failure"
        raise KeyError(op)

    return runner


OP_RUNNERS = {
    name: _run_scalar(name)
    for name in (
        "check_usual_minimum",
        "check_eps_minimum",
        "check_eps_quasi_minimum",
        "check_quasi_minimum_alpha",
        "check_regular_approx",
        "check_bounded_below",
        "check_lsc",
        "check_continuity",
        "check_wgm_condition_iv",
        "check_local_variant",
        "verify_evp_premise",
        "ekeland_search",
    )
}
OP_RUNNERS.update(
    {
        name: _run_vector(name)
        for name in (
            "check_efficient",
            "check_quasi_efficient",
            "quasi_efficient_with_lipschitz_alpha",
            "find_multipliers",
            "find_multipliers_with_lipschitz_alpha",
        )
    }
)


@dataclass(frozen=True)
class CorpusRow:
    fixture: str
    candidate: int
    op: str
    params: dict
    expected: str
    actual: str

    @property
    def passed(self):
        return self.expected == self.actual

    def to_dict(self):
        return {
            "fixture": self.fixture,
            "candidate": self.candidate,
            "op": self.op,
            "params": dict(sorted(self.params.items())),
            "expected": self.expected,
            "actual": self.actual,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class CorpusResult:
    rows: tuple

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    @property
    def failures(self):
        return tuple(r for r in self.rows if not r.passed)

    def to_dict(self):
        return {
            "passed": self.passed,
            "total": len(self.rows),
            "failed": len(self.failures),
            "rows": [r.to_dict() for r in self.rows],
        }


def run_corpus(plan, fixtures=None, corpus_dir=None):
    """Execute every fixture expectation; mismatches name fixture and operation."""
    if fixtures is None:
        fixtures = load_corpus(corpus_dir)
    rows = []
    for fixture in sorted(fixtures, key=lambda fx: fx.name):
        for expectation in fixture.spec.expect:
            if expectation.op not in OP_RUNNERS:
                raise KeyError(
                    f"fixture {fixture.name!r} expects unknown operation {expectation.op!r}"
                )
            actual = OP_RUNNERS[expectation.op](
                fixture, expectation.candidate, expectation.params, plan
            )
            rows.append(
                CorpusRow(
                    fixture=fixture.name,
                    candidate=expectation.candidate,
                    op=expectation.op,
                    params=expectation.params,
                    expected=expectation.status,
                    actual=actual,
                )
            )
    return CorpusResult(tuple(rows))
