"""Piecewise-defined extended-real functions and structured domain sets.

The textual form is a header ``n=<dim>;`` followed by guarded branches
``<guard> : <expr> ;`` and a final ``else : <expr or inf>``.  Guards are
comparisons joined by ``and``; the first matching guard wins.  ``+inf`` is a
distinguished value (branch body ``inf``), never a large float, and evaluation
never produces NaN: partial operations (sqrt of a negative, division by zero)
raise instead.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field

import numpy as np

INF = math.inf

_FUNCTIONS = ("abs", "sqrt", "min", "max", "norm")
_KEYWORDS = ("and", "else", "inf", "n")
_CMP_OPS = ("<=", "<", ">=", ">")


class FuncDSLError(Exception):
    pass


class ParseError(FuncDSLError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class EvaluationError(FuncDSLError):
    pass


class DomainError(FuncDSLError):
    pass


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expr:
    """Expression tree node.

    kind is one of: const, var, sum, diff, prod, quot, pow, abs, sqrt,
    min, max, norm.  ``pow`` exponents are nonnegative integer constants.
    """

    kind: str
    children: tuple = ()
    value: float | None = None
    index: int | None = None

    def __post_init__(self):
        if self.kind == "const" and self.value is None:
            raise ValueError("const node needs a value")
        if self.kind == "var" and self.index is None:
            raise ValueError("var node needs an index")


def _const(v):
    return Expr("const", value=float(v))


def _eval_expr(expr, pts):
    """Evaluate an expression on an (N, n) point block; returns an (N,) array."""
    kind = expr.kind
    if kind == "const":
        return np.full(pts.shape[0], expr.value)
    if kind == "var":
        return pts[:, expr.index]
    if kind == "sum":
        return _eval_expr(expr.children[0], pts) + _eval_expr(expr.children[1], pts)
    if kind == "diff":
        a = _eval_expr(expr.children[0], pts)
        b = _eval_expr(expr.children[1], pts)
        return a - b
    if kind == "prod":
        return _eval_expr(expr.children[0], pts) * _eval_expr(expr.children[1], pts)
    if kind == "quot":
        num = _eval_expr(expr.children[0], pts)
        den = _eval_expr(expr.children[1], pts)
        bad = den == 0.0
        if np.any(bad):
            where = pts[np.argmax(bad)]
            raise EvaluationError(f"division by zero at point {tuple(where)}")
        return num / den
    if kind == "pow":
        base = _eval_expr(expr.children[0], pts)
        exponent = int(expr.children[1].value)
        return base ** exponent
    if kind == "abs":
        return np.abs(_eval_expr(expr.children[0], pts))
    if kind == "sqrt":
        arg = _eval_expr(expr.children[0], pts)
        bad = arg < 0.0
        if np.any(bad):
            where = pts[np.argmax(bad)]
            raise EvaluationError(
                f"sqrt of negative value {arg[np.argmax(bad)]} at point {tuple(where)}"
            )
        return np.sqrt(arg)
    if kind == "min":
        return np.minimum.reduce([_eval_expr(c, pts) for c in expr.children])
    if kind == "max":
        return np.maximum.reduce([_eval_expr(c, pts) for c in expr.children])
    if kind == "norm":
        acc = np.zeros(pts.shape[0])
        for c in expr.children:
            v = _eval_expr(c, pts)
            acc = acc + v * v
        return np.sqrt(acc)
    raise EvaluationError(f"unknown expression kind {kind!r}")


def _is_constant(expr):
    if expr.kind == "const":
        return True
    if expr.kind == "var":
        return False
    return all(_is_constant(c) for c in expr.children)


def _is_piecewise_linear(expr):
    """True when the expression defines a piecewise-linear function of x."""
    kind = expr.kind
    if kind in ("const", "var"):
        return True
    if kind in ("sum", "diff"):
        return all(_is_piecewise_linear(c) for c in expr.children)
    if kind == "prod":
        a, b = expr.children
        return (_is_constant(a) and _is_piecewise_linear(b)) or (
            _is_constant(b) and _is_piecewise_linear(a)
        )
    if kind == "quot":
        return _is_constant(expr.children[1]) and _is_piecewise_linear(expr.children[0])
    if kind == "pow":
        exponent = int(expr.children[1].value)
        if exponent == 0:
            return True
        if exponent == 1:
            return _is_piecewise_linear(expr.children[0])
        return _is_constant(expr.children[0])
    if kind in ("abs", "min", "max"):
        return all(_is_piecewise_linear(c) for c in expr.children)
    if kind == "sqrt":
        return _is_constant(expr.children[0])
    if kind == "norm":
        if len(expr.children) == 1:
            return _is_piecewise_linear(expr.children[0])
        return all(_is_constant(c) for c in expr.children)
    return False


# ---------------------------------------------------------------------------
# Guards and piecewise functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Comparison:
    lhs: Expr
    op: str
    rhs: Expr

    def holds(self, pts):
        a = _eval_expr(self.lhs, pts)
        b = _eval_expr(self.rhs, pts)
        if self.op == "<=":
            return a <= b
        if self.op == "<":
            return a < b
        if self.op == ">=":
            return a >= b
        if self.op == ">":
            return a > b
        raise EvaluationError(f"unknown comparison {self.op!r}")


@dataclass(frozen=True)
class Branch:
    guard: tuple  # tuple of Comparison; empty guard always matches (else)
    body: Expr | None  # None encodes the extended value +inf

    def guard_mask(self, pts):
        mask = np.ones(pts.shape[0], dtype=bool)
        for comparison in self.guard:
            mask &= comparison.holds(pts)
        return mask


@dataclass(frozen=True)
class PiecewiseFn:
    """Extended-real function on R^n given by ordered guarded branches."""

    n: int
    branches: tuple  # tuple of Branch, last one has an empty guard

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("dimension must be positive")
        if not self.branches or self.branches[-1].guard:
            raise ValueError("last branch must be the unguarded else branch")

    # -- evaluation ---------------------------------------------------------

    def evaluate_batch(self, pts):
        """Evaluate on an (N, n) array; +inf entries mark the extended value."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.n:
            raise EvaluationError(
                f"expected points of dimension {self.n}, got shape {pts.shape}"
            )
        out = np.empty(pts.shape[0])
        remaining = np.ones(pts.shape[0], dtype=bool)
        for branch in self.branches:
            if not np.any(remaining):
                break
            sel = remaining & branch.guard_mask(pts)
            if not np.any(sel):
                continue
            if branch.body is None:
                out[sel] = INF
            else:
                vals = _eval_expr(branch.body, pts[sel])
                nonfinite = ~np.isfinite(vals)
                if np.any(nonfinite):
                    where = pts[sel][np.argmax(nonfinite)]
                    raise EvaluationError(
                        f"non-finite branch value at point {tuple(where)}"
                    )
                out[sel] = vals
            remaining &= ~sel
        return out

    def evaluate(self, x):
        pts = np.asarray(x, dtype=float).reshape(1, -1)
        return float(self.evaluate_batch(pts)[0])

    __call__ = evaluate

    # -- structure ----------------------------------------------------------

    @property
    def is_piecewise_linear(self):
        return all(
            branch.body is None or _is_piecewise_linear(branch.body)
            for branch in self.branches
        )

    def serialize(self):
        parts = [f"n={self.n};"]
        for branch in self.branches[:-1]:
            guard = " and ".join(
                f"{_print_expr(c.lhs)} {c.op} {_print_expr(c.rhs)}"
                for c in branch.guard
            )
            parts.append(f" {guard} : {_print_expr(branch.body)} ;")
        last = self.branches[-1]
        body = "inf" if last.body is None else _print_expr(last.body)
        parts.append(f" else : {body}")
        return "".join(parts)


def evaluate(f, x):
    """Evaluate a PiecewiseFn at a point; returns a finite float or +inf."""
    return f.evaluate(x)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_LEVEL = {"sum": 1, "diff": 1, "prod": 2, "quot": 2, "pow": 3}


def _fmt_number(v):
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def _print_expr(expr, parent_level=0, right_side=False):
    kind = expr.kind
    if kind == "const":
        return _fmt_number(expr.value)
    if kind == "var":
        return f"x{expr.index + 1}"
    if kind in ("abs", "sqrt", "min", "max", "norm"):
        args = ", ".join(_print_expr(c) for c in expr.children)
        return f"{kind}({args})"
    if kind == "pow":
        # pow is non-associative in the grammar: any operator base needs parens
        base = _print_expr(expr.children[0], 4, False)
        text = f"{base} ^ {_fmt_number(expr.children[1].value)}"
        level = _LEVEL["pow"]
    else:
        symbol = {"sum": "+", "diff": "-", "prod": "*", "quot": "/"}[kind]
        level = _LEVEL[kind]
        lhs = _print_expr(expr.children[0], level, False)
        rhs = _print_expr(expr.children[1], level, True)
        text = f"{lhs} {symbol} {rhs}"
    needs_parens = level < parent_level or (level == parent_level and right_side)
    return f"({text})" if needs_parens else text


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op><=|>=|[=;:,()+\-*/^<>])"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text):
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            tokens.append(_Token(kind, tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.n = None

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def error(self, message):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column)

    # grammar ---------------------------------------------------------------

    def parse(self):
        self.expect("n")
        self.expect("=")
        tok = self.next()
        if tok.kind != "num" or float(tok.text) != int(float(tok.text)):
            raise ParseError("dimension must be an integer", tok.line, tok.column)
        self.n = int(float(tok.text))
        if self.n < 1:
            raise ParseError("dimension must be positive", tok.line, tok.column)
        self.expect(";")
        branches = []
        while True:
            if self.peek().text == "else":
                self.next()
                self.expect(":")
                if self.peek().text == "inf":
                    self.next()
                    body = None
                else:
                    body = self.parse_expr()
                if self.peek().text == ";":
                    self.next()
                tok = self.peek()
                if tok.kind != "eof":
                    raise ParseError("trailing input after else branch", tok.line, tok.column)
                branches.append(Branch(guard=(), body=body))
                return PiecewiseFn(self.n, tuple(branches))
            guard = self.parse_guard()
            self.expect(":")
            body = self.parse_expr()
            self.expect(";")
            branches.append(Branch(guard=guard, body=body))

    def parse_guard(self):
        comparisons = [self.parse_comparison()]
        while self.peek().text == "and":
            self.next()
            comparisons.append(self.parse_comparison())
        return tuple(comparisons)

    def parse_comparison(self):
        lhs = self.parse_expr()
        tok = self.next()
        if tok.text not in _CMP_OPS:
            raise ParseError(f"expected comparison operator, found {tok.text!r}", tok.line, tok.column)
        rhs = self.parse_expr()
        return Comparison(lhs, tok.text, rhs)

    def parse_expr(self):
        node = self.parse_term()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            rhs = self.parse_term()
            node = Expr("sum" if op == "+" else "diff", (node, rhs))
        return node

    def parse_term(self):
        node = self.parse_factor()
        while self.peek().text in ("*", "/"):
            op = self.next().text
            rhs = self.parse_factor()
            node = Expr("prod" if op == "*" else "quot", (node, rhs))
        return node

    def parse_factor(self):
        if self.peek().text == "-":
            self.next()
            return Expr("diff", (_const(0.0), self.parse_factor()))
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        if self.peek().text == "^":
            tok = self.next()
            exp_tok = self.next()
            if exp_tok.kind != "num" or float(exp_tok.text) != int(float(exp_tok.text)) \
                    or float(exp_tok.text) < 0:
                raise ParseError(
                    "exponent must be a nonnegative integer literal",
                    exp_tok.line, exp_tok.column,
                )
            return Expr("pow", (base, _const(int(float(exp_tok.text)))))
        return base

    def parse_atom(self):
        tok = self.next()
        if tok.kind == "num":
            return _const(float(tok.text))
        if tok.text == "(":
            node = self.parse_expr()
            self.expect(")")
            return node
        if tok.kind == "name":
            if tok.text in _FUNCTIONS:
                return self.parse_call(tok)
            m = re.fullmatch(r"x(\d+)", tok.text)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.n:
                    raise ParseError(
                        f"variable x{idx} out of range for dimension {self.n}",
                        tok.line, tok.column,
                    )
                return Expr("var", index=idx - 1)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.line, tok.column)
        raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.column)

    def parse_call(self, tok):
        name = tok.text
        self.expect("(")
        args = [self.parse_expr()]
        while self.peek().text == ",":
            self.next()
            args.append(self.parse_expr())
        self.expect(")")
        if name in ("abs", "sqrt") and len(args) != 1:
            raise ParseError(f"{name} takes exactly one argument", tok.line, tok.column)
        if name in ("min", "max") and len(args) < 2:
            raise ParseError(f"{name} takes at least two arguments", tok.line, tok.column)
        if name == "sqrt" and _is_constant(args[0]):
            # obvious unguarded sqrt domain violation is a parse error
            val = _eval_expr(args[0], np.zeros((1, self.n)))[0]
            if val < 0:
                raise ParseError("sqrt of a negative constant", tok.line, tok.column)
        return Expr(name, tuple(args))


def parse_function(text):
    """Parse a function-spec string into a PiecewiseFn."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Domain sets
# ---------------------------------------------------------------------------

class DomainSet:
    """Structured subset of R^n with exact membership and projection."""

    dim: int

    def contains(self, pts):
        raise NotImplementedError

    def contains_point(self, x):
        pts = np.asarray(x, dtype=float).reshape(1, -1)
        return bool(self.contains(pts)[0])

    def project(self, pts):
        """Project onto the closure of the set (exact except Intersection)."""
        raise NotImplementedError

    def bounding_box(self):
        """(lo, hi) arrays, entries may be +-inf."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def intersect_ball(self, center, delta, closed=False):
        return Intersection((self, Ball(tuple(center), float(delta), closed=closed)))

    def _check_dim(self, pts):
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise DomainError(f"expected points of dimension {self.dim}, got {pts.shape}")


@dataclass(frozen=True)
class Full(DomainSet):
    dim: int

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        self._check_dim(pts)
        return np.ones(pts.shape[0], dtype=bool)

    def project(self, pts):
        return np.asarray(pts, dtype=float)

    def bounding_box(self):
        return np.full(self.dim, -INF), np.full(self.dim, INF)

    def to_dict(self):
        return {"kind": "full", "dim": self.dim}


@dataclass(frozen=True)
class Box(DomainSet):
    """Axis box; per-coordinate bounds may be open or infinite."""

    bounds: tuple  # tuple of (lo, hi, lo_closed, hi_closed)

    def __post_init__(self):
        for lo, hi, _, _ in self.bounds:
            if lo > hi:
                raise DomainError(f"empty box interval [{lo}, {hi}]")

    @property
    def dim(self):
        return len(self.bounds)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        self._check_dim(pts)
        mask = np.ones(pts.shape[0], dtype=bool)
        for i, (lo, hi, lo_closed, hi_closed) in enumerate(self.bounds):
            col = pts[:, i]
            mask &= (col >= lo) if lo_closed else (col > lo)
            mask &= (col <= hi) if hi_closed else (col < hi)
        return mask

    def project(self, pts):
        pts = np.asarray(pts, dtype=float)
        self._check_dim(pts)
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return np.clip(pts, lo, hi)

    def bounding_box(self):
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return lo, hi

    def to_dict(self):
        return {
            "kind": "box",
            "bounds": [
                {
                    "lo": None if math.isinf(lo) else lo,
                    "hi": None if math.isinf(hi) else hi,
                    "lo_closed": lc,
                    "hi_closed": hc,
                }
                for lo, hi, lc, hc in self.bounds
            ],
        }


@dataclass(frozen=True)
class Halfspace(DomainSet):
    """Closed halfspace a.x <= b."""

    a: tuple
    b: float

    def __post_init__(self):
        if all(v == 0 for v in self.a):
            raise DomainError("halfspace normal must be nonzero")

    @property
    def dim(self):
        return len(self.a)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        self._check_dim(pts)
        return pts @ np.asarray(self.a) <= self.b

    def project(self, pts):
        pts = np.asarray(pts, dtype=float)
        self._check_dim(pts)
        a = np.asarray(self.a)
        excess = np.maximum(0.0, pts @ a - self.b) / (a @ a)
        return pts - np.outer(excess, a)

    def bounding_box(self):
        lo = np.full(self.dim, -INF)
        hi = np.full(self.dim, INF)
        nz = [i for i, v in enumerate(self.a) if v != 0]
        if len(nz) == 1:
            i = nz[0]
            if self.a[i] > 0:
                hi[i] = self.b / self.a[i]
            else:
                lo[i] = self.b / self.a[i]
        return lo, hi

    def to_dict(self):
        return {"kind": "halfspace", "a": list(self.a), "b": self.b}


@dataclass(frozen=True)
class Ball(DomainSet):
    """Euclidean ball; open balls realize the deleted-neighborhood side conditions."""

    center: tuple
    radius: float
    closed: bool = True

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("ball radius must be positive")

    @property
    def dim(self):
        return len(self.center)

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        self._check_dim(pts)
        d = np.linalg.norm(pts - np.asarray(self.center), axis=1)
        return d <= self.radius if self.closed else d < self.radius

    def project(self, pts):
        pts = np.asarray(pts, dtype=float)
        self._check_dim(pts)
        c = np.asarray(self.center)
        diff = pts - c
        d = np.linalg.norm(diff, axis=1)
        factor = np.ones_like(d)
        outside = d > self.radius
        factor[outside] = self.radius / d[outside]
        return c + diff * factor[:, None]

    def bounding_box(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def to_dict(self):
        return {
            "kind": "ball",
            "center": list(self.center),
            "radius": self.radius,
            "closed": self.closed,
        }


@dataclass(frozen=True)
class Intersection(DomainSet):
    members: tuple

    _MAX_SWEEPS = 500

    def __post_init__(self):
        if not self.members:
            raise DomainError("intersection needs at least one member")
        dims = {m.dim for m in self.members}
        if len(dims) != 1:
            raise DomainError("intersection members must share a dimension")

    @property
    def dim(self):
        return self.members[0].dim

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        self._check_dim(pts)
        mask = np.ones(pts.shape[0], dtype=bool)
        for m in self.members:
            mask &= m.contains(pts)
        return mask

    def project(self, pts):
        """Alternating projection onto member closures, capped at 500 sweeps."""
        cur = np.asarray(pts, dtype=float).copy()
        scale = 1.0 + float(np.max(np.abs(cur), initial=0.0))
        for _ in range(self._MAX_SWEEPS):
            prev = cur
            for m in self.members:
                cur = m.project(cur)
            if np.max(np.abs(cur - prev), initial=0.0) <= 1e-13 * scale:
                break
        return cur

    def bounding_box(self):
        los, his = zip(*(m.bounding_box() for m in self.members))
        return np.max(los, axis=0), np.min(his, axis=0)

    def to_dict(self):
        return {"kind": "intersection", "members": [m.to_dict() for m in self.members]}


def membership(domain, x):
    """Exact membership test of a point in a DomainSet."""
    return domain.contains_point(x)


def domain_from_dict(doc):
    kind = doc["kind"]
    if kind == "full":
        return Full(int(doc["dim"]))
    if kind == "box":
        bounds = []
        for b in doc["bounds"]:
            if isinstance(b, (list, tuple)):
                lo = -INF if b[0] is None else float(b[0])
                hi = INF if b[1] is None else float(b[1])
                bounds.append((lo, hi, True, True))
            else:
                lo = -INF if b.get("lo") is None else float(b["lo"])
                hi = INF if b.get("hi") is None else float(b["hi"])
                bounds.append((lo, hi, bool(b.get("lo_closed", True)), bool(b.get("hi_closed", True))))
        return Box(tuple(bounds))
    if kind == "halfspace":
        return Halfspace(tuple(float(v) for v in doc["a"]), float(doc["b"]))
    if kind == "ball":
        return Ball(
            tuple(float(v) for v in doc["center"]),
            float(doc["radius"]),
            bool(doc.get("closed", True)),
        )
    if kind == "intersection":
        return Intersection(tuple(domain_from_dict(m) for m in doc["members"]))
    raise DomainError(f"unknown domain kind {kind!r}")


# ---------------------------------------------------------------------------
# Problem-spec documents
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Expectation:
    op: str
    status: str
    params: dict = field(default_factory=dict)
    candidate: int = 0


@dataclass(frozen=True)
class ProblemSpec:
    """Parsed problem-spec document: objectives, constraints, domain, candidates."""

    name: str
    objectives: tuple
    constraints: tuple
    domain: DomainSet
    candidates: tuple
    params: dict = field(default_factory=dict)
    tags: tuple = ()
    notes: str = ""
    expect: tuple = ()

    def __post_init__(self):
        dims = {f.n for f in self.objectives} | {g.n for g in self.constraints}
        dims.add(self.domain.dim)
        if len(dims) != 1:
            raise FuncDSLError(f"dimension mismatch in problem spec {self.name!r}: {dims}")
        for c in self.candidates:
            if len(c) != self.domain.dim:
                raise FuncDSLError(f"candidate {c} has wrong dimension in {self.name!r}")

    @property
    def n(self):
        return self.domain.dim

    @property
    def is_scalar(self):
        return len(self.objectives) == 1 and not self.constraints

    @property
    def objective(self):
        return self.objectives[0]


def problem_spec_from_dict(doc, name="<spec>"):
    objectives = tuple(parse_function(s) for s in doc.get("objectives", ()))
    if not objectives:
        raise FuncDSLError("problem spec needs at least one objective")
    constraints = tuple(parse_function(s) for s in doc.get("constraints", ()))
    domain = domain_from_dict(doc["domain"])
    candidates = tuple(tuple(float(v) for v in c) for c in doc.get("candidates", ()))
    expect = tuple(
        Expectation(
            op=e["op"],
            status=e["status"],
            params=dict(e.get("params", {})),
            candidate=int(e.get("candidate", 0)),
        )
        for e in doc.get("expect", ())
    )
    return ProblemSpec(
        name=doc.get("name", name),
        objectives=objectives,
        constraints=constraints,
        domain=domain,
        candidates=candidates,
        params=dict(doc.get("params", {})),
        tags=tuple(doc.get("tags", ())),
        notes=doc.get("notes", ""),
        expect=expect,
    )


def load_problem_spec(path):
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return problem_spec_from_dict(doc, name=str(path))
