"""Residual records shared by the verification routines and the CLI."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

PASS = "pass"
FAIL = "fail"
ILL = "ill_conditioned"


def relative_residual(lhs: complex, rhs: complex) -> float:
    """``|lhs - rhs| / (|lhs| + |rhs| + 1)``."""
    return abs(lhs - rhs) / (abs(lhs) + abs(rhs) + 1.0)


@dataclass
class CaseRecord:
    case_id: str
    params: dict[str, Any]
    residuals: list[float]
    max_residual: float
    status: str
    tol: float
    flags: list[bool] = field(default_factory=list)
    detail: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residuals(
        cls,
        case_id: str,
        params: dict[str, Any],
        residuals: Sequence[float],
        tol: float,
        flags: Sequence[bool] | None = None,
        detail: dict[str, Any] | None = None,
    ) -> "CaseRecord":
        """Classify a case.

        A sample is flagged when its evaluation is too cancellation-prone to
        certify.  Flagged samples cannot fail a case: if the only failing
        samples are flagged the case is ``ill_conditioned``.
        """
        residuals = [float(x) for x in residuals]
        flags = [bool(f) for f in flags] if flags is not None else [False] * len(residuals)
        bad = [not x <= tol for x in residuals]
        if any(b and not f for b, f in zip(bad, flags)):
            status = FAIL
        elif any(bad):
            status = ILL
        else:
            status = PASS
        kept = [x for x, f in zip(residuals, flags) if not f]
        worst = max(kept) if kept else max(residuals, default=0.0)
        return cls(case_id, params, residuals, worst, status, tol, flags, detail or {})

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class ResidualReport:
    records: list[CaseRecord] = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def n_pass(self) -> int:
        return sum(r.status == PASS for r in self.records)

    @property
    def n_fail(self) -> int:
        return sum(r.status == FAIL for r in self.records)

    @property
    def n_flagged(self) -> int:
        return sum(r.status == ILL for r in self.records)

    @property
    def passed(self) -> bool:
        return self.n_fail == 0

    @property
    def max_residual(self) -> float:
        return max((r.max_residual for r in self.records if r.status != ILL), default=0.0)

    def merge(self, other: "ResidualReport") -> "ResidualReport":
        return ResidualReport(self.records + other.records, self.wall_time + other.wall_time)

    @classmethod
    def combine(cls, reports: Iterable["ResidualReport"]) -> "ResidualReport":
        out = cls()
        for rep in reports:
            out = out.merge(rep)
        out.records.sort(key=lambda rec: rec.case_id)
        return out

    def summary(self) -> dict[str, Any]:
        return {
            "n_cases": len(self.records),
            "n_pass": self.n_pass,
            "n_fail": self.n_fail,
            "n_flagged": self.n_flagged,
            "max_residual": self.max_residual,
            "wall_time": self.wall_time,
        }

    def to_dict(self) -> dict[str, Any]:
        return {"records": [r.to_dict() for r in self.records], "summary": self.summary()}
