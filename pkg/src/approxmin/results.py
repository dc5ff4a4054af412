"""Shared result types: verdicts of sampled checks and their sample census."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

HOLDS = "holds-on-sample"
FAILS = "fails"
VACUOUS = "vacuous"

_STATUSES = (HOLDS, FAILS, VACUOUS)


def _as_float_tuple(x):
    return tuple(float(v) for v in x)


@dataclass(frozen=True)
class SampleCensus:
    """How many points backed a sampled universal/existential claim."""

    lattice: int = 0
    ball: int = 0
    total: int = 0

    def to_dict(self):
        return {"lattice": self.lattice, "ball": self.ball, "total": self.total}


@dataclass(frozen=True)
class Witness:
    """Point at which a checked inequality is violated, with the values seen there."""

    point: tuple
    values: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "point": [float(v) for v in self.point],
            "values": {k: _json_num(v) for k, v in sorted(self.values.items())},
        }


@dataclass(frozen=True)
class Verdict:
    """Outcome of one sampled check.

    A failure carries an exact witness; a pass only certifies the sampled
    census, never the continuum claim.
    """

    status: str
    witness: Witness | None = None
    census: SampleCensus = field(default_factory=SampleCensus)
    tolerance: float = 0.0
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"unknown verdict status {self.status!r}")
        if self.status == FAILS and self.witness is None:
            raise ValueError("failing verdict requires a witness")

    @property
    def holds(self):
        return self.status == HOLDS

    @property
    def fails(self):
        return self.status == FAILS

    def to_dict(self):
        out = {
            "status": self.status,
            "tolerance": _json_num(self.tolerance),
            "census": self.census.to_dict(),
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        if self.info:
            out["info"] = {k: _json_num(v) for k, v in sorted(self.info.items())}
        return out


def _json_num(v):
    """Make a value JSON-safe and deterministic (inf has no JSON literal)."""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, (list, tuple)):
        return [_json_num(x) for x in v]
    if isinstance(v, dict):
        return {k: _json_num(x) for k, x in sorted(v.items())}
    if hasattr(v, "item"):  # numpy scalar
        return _json_num(v.item())
    if hasattr(v, "to_dict"):
        return v.to_dict()
    return v
