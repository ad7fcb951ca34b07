"""Confluent duality: ``s phi r-1`` against ``s phi-hat r-1`` with ``s < r``.

The left-hand side pairs the standard series at ``W q^((s-r) a_i) z`` with the
Bailey-Slater series at ``z``; the right-hand side is a Laurent polynomial over
``(z;q)_{t+}`` only.  Evaluation and the beta table reuse the machinery of
:mod:`qduality.duality`, which is written for ``len(b) = s`` generally.
"""
from __future__ import annotations

from typing import Sequence

from .duality import (
    BetaTable,
    HypergeometricParams,
    beta_table,
    identity_residual,
    lhs_eval,
    rhs_eval,
    summation_record,
    summation_sides,
)
from .qcore import d_coefficients, qpoch
from .report import ResidualReport

__all__ = [
    "ConfluentParams",
    "confluent_lhs_eval",
    "confluent_rhs_eval",
    "confluent_beta_table",
    "confluent_residual",
    "prop3_sides",
    "prop3_check",
]


class ConfluentParams(HypergeometricParams):
    """``a``, ``n`` of length ``r``; ``b``, ``m`` of length ``s`` with ``0 <= s < r``."""

    def _validate(self) -> None:
        if self.r < 1:
            raise ValueError("need r >= 1")
        if not 0 <= self.s < self.r:
            raise ValueError(f"need 0 <= s < r, got s = {self.s}, r = {self.r}")
        super()._validate()

    @property
    def p_prime(self) -> int:
        return (self.M - self.N - self.r - self.t + 1) // (self.r - self.s)

    @property
    def K(self) -> int:
        head = -self.m_min - 1 if self.m else self.p_prime
        return max(head, self.p_prime) + self.t_plus

    @property
    def k_range(self) -> tuple[int, int]:
        return -self.n_max, self.K

    @property
    def w_factor_length(self) -> int:
        return 0

    def rhs_denominator(self, z: complex) -> complex:
        return qpoch(z, self.base, self.t_plus)

    def denominator_zeros(self) -> list[complex]:
        return [1 / self.q**j for j in range(self.t_plus)]

    def d_coeffs(self) -> list[complex]:
        # (Wz;q)_0 = 1 leaves the Gauss coefficients of (z;q)_{t+}
        return d_coefficients(self.W, -1, self.t, self.base)

    def summation_denominator(self) -> complex:
        return 1 + 0j


def confluent_lhs_eval(params: ConfluentParams, z: complex, tol: float = 1e-17) -> complex:
    return lhs_eval(params, z, tol)


def confluent_beta_table(params: ConfluentParams, check: bool = True) -> BetaTable:
    """``beta_k`` for ``-n_max <= k <= K`` by the ``(z;q)_{t+}`` convolution;
    the ``alpha_j`` use the terminating series at ``q^(N-M+r-1+t+j(r-s))``."""
    return beta_table(params, check=check)


def confluent_rhs_eval(params: ConfluentParams, z: complex, table: BetaTable | None = None) -> complex:
    return rhs_eval(params, z, table)


def confluent_residual(
    params: ConfluentParams, z_samples: Sequence[complex], tol: float = 1e-8, case_id: str = "confluent"
) -> ResidualReport:
    return identity_residual(params, z_samples, tol, case_id)


def prop3_sides(params: ConfluentParams) -> tuple[complex, complex, float]:
    return summation_sides(params)


def prop3_check(params: ConfluentParams, tol: float = 1e-8, case_id: str = "prop3") -> ResidualReport:
    lhs, rhs, scale = prop3_sides(params)
    return ResidualReport([summation_record(lhs, rhs, scale, params.t, tol, case_id, params.to_dict())])
