"""Closed forms of the right-hand side for five small ``r = 3`` cases.

Each case fixes ``m``, ``n`` and ``t``; ``a``, ``b`` and ``q`` are free.  The
closed forms are written with zero-based indices (``a[2]`` is the third
exponent).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .duality import QParams, beta_table, rhs_eval
from .report import CaseRecord, ResidualReport, relative_residual

__all__ = ["GoldenCase", "GOLDEN_CASES", "REAL_TRIPLE", "COMPLEX_TRIPLE", "GOLDEN_Q", "golden_check", "golden_report"]

GOLDEN_Q = 0.3
REAL_TRIPLE = ((0.17, 0.59, 1.13), (0.23, 0.71, 1.37))
COMPLEX_TRIPLE = ((0.17 + 0.1j, 0.59 - 0.2j, 1.13 + 0.15j), (0.23 - 0.05j, 0.71 + 0.2j, 1.37 - 0.1j))
GOLDEN_Z = (0.11 + 0.05j, -0.2 + 0.13j, 0.07 - 0.25j, -0.15 - 0.1j, 0.3 + 0.02j)


@dataclass(frozen=True)
class GoldenCase:
    name: str
    m: tuple[int, int, int]
    n: tuple[int, int, int]
    t: int
    beta: Callable[[QParams], dict[int, complex]]

    def params(self, a: Sequence[complex], b: Sequence[complex], q: complex = GOLDEN_Q) -> QParams:
        return QParams(a, b, self.m, self.n, self.t, q)

    def rhs(self, params: QParams, z: complex) -> complex:
        """The closed form of the right-hand side at ``z``."""
        num = sum((c * z**k for k, c in self.beta(params).items()), 0j)
        return num / params.rhs_denominator(z)


def _beta_1(p: QParams) -> dict[int, complex]:
    qp, a, b = p.qp, p.a, p.b
    return {-2: qp(a[2]) / (1 - qp(a[2] - b[0]))}


def _beta_2(p: QParams) -> dict[int, complex]:
    qp, a, b = p.qp, p.a, p.b
    num = (1 - qp(a[2] - a[0] - 1)) * (1 - qp(a[2] - a[0] - 2)) * qp(a[2] + b[0] + b[1] + b[2])
    den = (qp(b[0]) - qp(a[2])) * (qp(b[1]) - qp(a[2])) * (qp(b[2]) - qp(a[2]))
    return {-3: num / den}


def _beta_3(p: QParams) -> dict[int, complex]:
    qp, a, b = p.qp, p.a, p.b
    return {-1: qp(a[2]) / (1 - qp(a[2] - b[0]))}


def _beta_4(p: QParams) -> dict[int, complex]:
    qp, a, b = p.qp, p.a, p.b
    return {-1: 1 / (1 - qp(a[2] - b[0])), 0: 1 / (1 - qp(b[0] - a[2]))}


def _beta_5(p: QParams) -> dict[int, complex]:
    qp, a, b = p.qp, p.a, p.b
    return {
        -1: qp(2 * a[2]) / (1 - qp(a[2] - b[0])),
        0: qp(1 + a[0] + a[1] + 2 * a[2] + b[0] - b[1] - b[2]) / (qp(a[2]) - qp(b[0])),
    }


GOLDEN_CASES = (
    GoldenCase("example1", (1, 2, 2), (1, 1, 2), 0, _beta_1),
    GoldenCase("example2", (2, 2, 2), (0, 2, 3), 0, _beta_2),
    GoldenCase("example3", (0, 1, 1), (0, 0, 1), 0, _beta_3),
    GoldenCase("example4", (0, 1, 1), (0, 0, 1), 1, _beta_4),
    GoldenCase("example5", (0, 1, 1), (0, 0, 1), -1, _beta_5),
)


def golden_check(
    case: GoldenCase,
    a: Sequence[complex],
    b: Sequence[complex],
    q: complex = GOLDEN_Q,
    tol: float = 1e-9,
    z_points: Sequence[complex] = GOLDEN_Z,
    case_id: str | None = None,
) -> CaseRecord:
    """Compare ``beta_table`` and ``rhs_eval`` with the closed form.

    Coefficients missing from the closed form must vanish; they are compared
    against the largest closed-form coefficient.
    """
    params = case.params(a, b, q)
    table = beta_table(params)
    expected = case.beta(params)
    size = max(abs(v) for v in expected.values())
    residuals = []
    for k, got in table.items():
        want = expected.get(k, 0j)
        residuals.append(abs(got - want) / max(abs(want), size))
    residuals.extend(relative_residual(rhs_eval(params, z, table), case.rhs(params, z)) for z in z_points)
    detail = {"beta": {str(k): [complex(v).real, complex(v).imag] for k, v in table.items()}}
    return CaseRecord.from_residuals(case_id or case.name, params.to_dict(), residuals, tol, detail=detail)


def golden_report(tol: float = 1e-9) -> ResidualReport:
    """All five cases at both exponent triples."""
    records = []
    for label, (a, b) in (("real", REAL_TRIPLE), ("complex", COMPLEX_TRIPLE)):
        for case in GOLDEN_CASES:
            records.append(golden_check(case, a, b, tol=tol, case_id=f"{case.name}-{label}"))
    return ResidualReport(records)
