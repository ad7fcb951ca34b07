"""Duality relations for generalized basic hypergeometric series, evaluated
numerically and checked against independent oracles."""
from .confluent import ConfluentParams, confluent_residual, prop3_check
from .duality import (
    BetaTable,
    QParams,
    alpha_coeff,
    beta_table,
    gamma_coeff,
    lhs_eval,
    prop1_check,
    rhs_eval,
    theorem1_residual,
)
from .qcore import QBase, q_binomial, q_gamma, q_pochhammer, q_pochhammer_inf
from .qseries import PhiSpec, Variant, phi, phi_eval, phi_hat, phi_hat_eval
from .report import CaseRecord, ResidualReport

__version__ = "0.1.0"

__all__ = [
    "BetaTable",
    "CaseRecord",
    "ConfluentParams",
    "PhiSpec",
    "QBase",
    "QParams",
    "ResidualReport",
    "Variant",
    "alpha_coeff",
    "beta_table",
    "confluent_residual",
    "gamma_coeff",
    "lhs_eval",
    "phi",
    "phi_eval",
    "phi_hat",
    "phi_hat_eval",
    "prop1_check",
    "prop3_check",
    "q_binomial",
    "q_gamma",
    "q_pochhammer",
    "q_pochhammer_inf",
    "rhs_eval",
    "theorem1_residual",
]
