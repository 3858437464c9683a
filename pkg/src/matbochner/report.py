"""Check records and the run manifest (pretty JSON, sorted keys)."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from . import __version__

__all__ = ["PASS", "FAIL", "INCONCLUSIVE", "CheckRecord", "Manifest", "jsonable"]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
_STATUSES = (PASS, FAIL, INCONCLUSIVE)

# stated in every manifest: results are finite certificates
ASSUMPTIONS = (
    "membership in D(W) is certified only for the listed indices n",
    "operator spaces are computed for bounded order s only",
    "exponential symbols are independent indeterminates",
    "adjointability boundary terms vanish by Gaussian decay and are not checked",
)


def jsonable(obj: Any) -> Any:
    """Plain JSON values for scalars, polynomials, matrices and operators."""
    from .diffop import DiffOp, op_to_json
    from .field import Scalar
    from .polymat import PolyMatrix, XPoly

    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    if isinstance(obj, Scalar):
        return obj.to_text()
    if isinstance(obj, XPoly):
        return obj.to_text()
    if isinstance(obj, PolyMatrix):
        return obj.to_nested_text()
    if isinstance(obj, DiffOp):
        return op_to_json(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    return str(obj)


@dataclass
class CheckRecord:
    check: str
    status: str
    paper_ref: str
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"bad status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_json(self) -> dict:
        return {"check": self.check, "status": self.status, "paper_ref": self.paper_ref,
                "details": jsonable(self.details)}


@dataclass
class Manifest:
    """Ordered by check name so output does not depend on completion order."""

    command: str
    parameters: dict
    mode: str
    seed: int
    records: list[CheckRecord] = field(default_factory=list)

    def add(self, rec: CheckRecord) -> CheckRecord:
        self.records.append(rec)
        return rec

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.records)

    def to_json(self) -> dict:
        recs = sorted(self.records, key=lambda r: r.check)
        return {
            "command": self.command,
            "parameters": jsonable(self.parameters),
            "mode": self.mode,
            "seed": self.seed,
            "tool_version": __version__,
            "assumptions": list(ASSUMPTIONS),
            "checks": [r.to_json() for r in recs],
            "summary": {s: sum(r.status == s for r in recs) for s in _STATUSES},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"
