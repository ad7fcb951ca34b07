"""Independent checks built from the rational functions ``f_k`` and ``F_k``.

``F_k(z) = z^(-t) f_k(z)`` with
``f_k(z) = -(z q^(1-b);q)_(k+m) / (z q^(-a);q)_(k+n+1)``.  Its residues at
``z = q^(a_i - j)`` are the gamma coefficients, so their sum ``alpha_k`` can
also be read off from the expansions of ``f_k`` at infinity and at zero.
Those expansions are produced here by log-derivative recurrences and, as a
separate route, by trapezoidal contour integrals.  Finally the beta table is
recovered from samples of the left-hand side alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpc

from .duality import (
    BetaTable,
    HypergeometricParams,
    QParams,
    admissible_radius,
    alpha_phi_sum,
)
from .extended import scaled_lhs_mp, unit_root, working_precision
from .qcore import qpoch
from .report import CaseRecord, ResidualReport, relative_residual

__all__ = [
    "PoleProximityError",
    "RationalFk",
    "SumConstants",
    "fk_eval",
    "Fk_eval",
    "fhat_eval",
    "g_k",
    "fk_head",
    "residue_at_pole",
    "residue_sum",
    "residue_at_zero",
    "q_recurrence",
    "fhat_coefficients",
    "p_recurrence",
    "c_minus1",
    "leading_coefficient",
    "closure_residual",
    "alpha_identity_sides",
    "alpha_identity_check",
    "contour_coefficients",
    "recover_beta_by_sampling",
    "SamplingError",
]

POLE_TOL = 1e-12
CONTOUR_NODES = 256
SAMPLING_DPS = 80


class PoleProximityError(ZeroDivisionError):
    """Evaluation point is (numerically) a pole."""


class SamplingError(ArithmeticError):
    """Sample-based coefficient recovery failed its consistency check."""


@dataclass(frozen=True)
class RationalFk:
    params: HypergeometricParams
    k: int

    def __call__(self, z: complex) -> complex:
        return fk_eval(self, z)

    @property
    def poles(self) -> list[tuple[int, int, complex]]:
        """``(i, j, z0)`` for the finite nonzero poles ``z0 = q^(a_i - j)``."""
        p = self.params
        return [
            (i, j, p.qp(p.a[i] - j))
            for i in range(p.r)
            for j in range(self.k + p.n[i] + 1)
        ]


@dataclass(frozen=True)
class SumConstants:
    A_sum: complex
    B_sum: complex
    M2: int
    N2: int
    dot_an: complex
    dot_bm: complex

    @classmethod
    def from_params(cls, p: HypergeometricParams) -> "SumConstants":
        return cls(
            sum(p.a, 0j),
            sum(p.b, 0j),
            sum(x * x for x in p.m),
            sum(x * x for x in p.n),
            sum((x * y for x, y in zip(p.a, p.n)), 0j),
            sum((x * y for x, y in zip(p.b, p.m)), 0j),
        )

    def A_ratio(self, p: HypergeometricParams) -> complex:
        """``prod_i q^(a_i - b_i + m_i - n_i)`` (the base of the large-z growth in k)."""
        return p.qp(self.A_sum - self.B_sum + p.M - p.N)


def _linear_product(x: complex, q: complex, n: int, skip: int | None = None) -> complex:
    """``(x;q)_n`` with pole checking, optionally leaving out factor ``skip``."""
    if n >= 0:
        prod = 1 + 0j
        qj = 1 + 0j
        for j in range(n):
            if j != skip:
                prod *= 1 - x * qj
            qj *= q
        return prod
    prod = 1 + 0j
    qj = 1 / q
    for _ in range(-n):
        f = 1 - x * qj
        if abs(f) < POLE_TOL:
            raise PoleProximityError(f"(x;q)_{n} is infinite at x = {x!r}")
        prod *= f
        qj /= q
    return 1 / prod


def _fk_parts(fk: RationalFk, z: complex, skip: tuple[int, int] | None = None) -> tuple[complex, complex]:
    p = fk.params
    q = p.q
    num = 1 + 0j
    for bl, ml in zip(p.b, p.m):
        num *= _linear_product(z * p.qp(1 - bl), q, fk.k + ml)
    den = 1 + 0j
    for i, (ai, ni) in enumerate(zip(p.a, p.n)):
        drop = skip[1] if skip is not None and skip[0] == i else None
        x = z * p.qp(-ai)
        n_i = fk.k + ni + 1
        if n_i > 0:
            qj = 1 + 0j
            for j in range(n_i):
                if j != drop:
                    f = 1 - x * qj
                    if abs(f) < POLE_TOL:
                        raise PoleProximityError(f"z = {z!r} is a pole of f_{fk.k}")
                    den *= f
                qj *= q
        else:
            den *= _linear_product(x, q, n_i)
    return num, den


def fk_eval(fk: RationalFk, z: complex) -> complex:
    num, den = _fk_parts(fk, complex(z))
    return -num / den


def Fk_eval(fk: RationalFk, z: complex) -> complex:
    z = complex(z)
    return z ** (-fk.params.t) * fk_eval(fk, z)


def g_k(z: complex, alpha: complex, beta: complex, k: int, q: complex) -> complex:
    """``(beta z;q)_k / (alpha z;q)_k``."""
    return qpoch(beta * z, q, k) / qpoch(alpha * z, q, k)


def fk_head(params: HypergeometricParams, z: complex) -> complex:
    """``R(z) = -(z q^(1-b);q)_m / (z q^(-a);q)_(n+1)``, the ``k``-free part of ``f_k``."""
    q = params.q
    num = 1 + 0j
    for bl, ml in zip(params.b, params.m):
        num *= qpoch(z * params.qp(1 - bl), q, ml)
    den = 1 + 0j
    for ai, ni in zip(params.a, params.n):
        den *= qpoch(z * params.qp(-ai), q, ni + 1)
    return -num / den


def residue_at_pole(fk: RationalFk, i: int, j: int) -> complex:
    """Residue of ``F_k`` at ``z0 = q^(a_i - j)``.

    The vanishing factor ``1 - z q^(j - a_i)`` is removed by index and the
    rest is evaluated at ``z0``; near ``z0`` that factor is
    ``-(z - z0)/z0``, so the residue is ``z0^(1-t) num(z0) / den'(z0)``.
    """
    p = fk.params
    if not 0 <= i < p.r:
        raise IndexError(i)
    if not 0 <= j <= fk.k + p.n[i]:
        raise ValueError(f"no pole at q^(a_{i} - {j}) for k = {fk.k}")
    z0 = p.qp(p.a[i] - j)
    try:
        num, den = _fk_parts(fk, z0, skip=(i, j))
    except PoleProximityError as exc:
        raise PoleProximityError(f"pole at q^(a_{i} - {j}) is not simple") from exc
    return z0 ** (1 - p.t) * num / den


def residue_sum(fk: RationalFk) -> complex:
    """Sum of the residues of ``F_k`` over its finite nonzero poles."""
    return sum((residue_at_pole(fk, i, j) for i, j, _ in fk.poles), 0j)


def _signed_range_sum(length: int, term: Callable[[int], complex]) -> complex:
    """``sum_{j=0}^{length-1} term(j)``, continued to negative ``length`` as
    ``-sum_{j=length}^{-1} term(j)`` (the log of a negative-index product)."""
    if length >= 0:
        return sum((term(j) for j in range(length)), 0j)
    return -sum((term(j) for j in range(length, 0)), 0j)


def _newton(power_sums: Sequence[complex], s_max: int) -> list[complex]:
    """Coefficients of ``exp(sum_s L_s x^s)`` from ``L_1..L_smax``."""
    out = [1 + 0j]
    for s in range(1, s_max + 1):
        out.append(sum(u * power_sums[u] * out[s - u] for u in range(1, s + 1)) / s)
    return out


def _require_k(params: HypergeometricParams, k: int) -> None:
    if params.m and k < -params.m_min:
        raise ValueError(f"need k >= -m_min = {-params.m_min}, got {k}")


def q_recurrence(params: HypergeometricParams, k: int, s_max: int) -> list[complex]:
    """``q_0 .. q_smax``: coefficients of ``fhat_k(z) = sum_s q_s z^(-s)``."""
    _require_k(params, k)
    qp = params.qp
    big = [0j]
    for s in range(1, s_max + 1):
        acc = 0j
        for ai, ni in zip(params.a, params.n):
            acc += _signed_range_sum(k + ni + 1, lambda j: qp((ai - ni - k + j) * s))
        for bl, ml in zip(params.b, params.m):
            acc -= _signed_range_sum(k + ml, lambda j: qp((bl - ml - k + j) * s))
        big.append(acc / s)
    return _newton(big, s_max)


def p_recurrence(params: HypergeometricParams, k: int, s_max: int) -> list[complex]:
    """``p_0 .. p_smax``: Taylor coefficients of ``-f_k`` at ``z = 0``."""
    _require_k(params, k)
    qp = params.qp
    big = [0j]
    for s in range(1, s_max + 1):
        acc = 0j
        for ai, ni in zip(params.a, params.n):
            acc += _signed_range_sum(k + ni + 1, lambda j: qp((-ai + j) * s))
        for bl, ml in zip(params.b, params.m):
            acc -= _signed_range_sum(k + ml, lambda j: qp((1 - bl + j) * s))
        big.append(acc / s)
    return _newton(big, s_max)


def _linear_factors(x: complex, q: complex, n: int) -> tuple[list[complex], list[complex]]:
    """``(x;q)_n = prod(1 - c w) / prod(1 - d w)`` at ``w = 1``: the lists ``c`` and ``d``."""
    if n >= 0:
        return [x * q**j for j in range(n)], []
    return [], [x * q ** (-j) for j in range(1, -n + 1)]


def fhat_coefficients(params: HypergeometricParams, k: int, s_max: int) -> list[complex]:
    """``q_0 .. q_smax`` by multiplying out the linear factors of ``fhat_k``.

    Same numbers as :func:`q_recurrence`, without the power-sum cancellation
    that the log-derivative route suffers once the factors spread in modulus.
    """
    _require_k(params, k)
    q = params.q
    ups: list[complex] = []
    downs: list[complex] = []
    for bl, ml in zip(params.b, params.m):
        c, d = _linear_factors(params.qp(bl - k - ml), q, k + ml)
        ups += c
        downs += d
    for ai, ni in zip(params.a, params.n):
        c, d = _linear_factors(params.qp(ai - k - ni), q, k + ni + 1)
        ups += d
        downs += c
    out = np.zeros(s_max + 1, dtype=complex)
    out[0] = 1
    for c in ups:
        out[1:] -= c * out[:-1].copy()
    for d in downs:
        for s in range(1, s_max + 1):
            out[s] += d * out[s - 1]
    return [complex(v) for v in out]


def fhat_eval(params: HypergeometricParams, k: int, z: complex) -> complex:
    """``(z^-1 q^(b-k-m);q)_(k+m) / (z^-1 q^(a-k-n);q)_(k+n+1)``, which tends to 1."""
    w = 1 / complex(z)
    q = params.q
    num = 1 + 0j
    for bl, ml in zip(params.b, params.m):
        num *= _linear_product(w * params.qp(bl - k - ml), q, k + ml)
    den = 1 + 0j
    for ai, ni in zip(params.a, params.n):
        den *= _linear_product(w * params.qp(ai - k - ni), q, k + ni + 1)
    return num / den


def leading_coefficient(params: QParams, k: int) -> complex:
    """``f_k(z) ~ leading_coefficient * z^(M-N-r)`` as ``z -> infinity``."""
    c = SumConstants.from_params(params)
    sign = (-1) ** (params.M - params.N - params.r + 1)
    expo = (
        k * (c.A_sum - c.B_sum + params.M - params.N)
        + c.A_sum
        + c.dot_an
        - c.dot_bm
        + (c.M2 - c.N2 + params.M - params.N) / 2
    )
    return sign * params.qp(expo)


def c_minus1(params: QParams, k: int) -> complex:
    """Coefficient of ``z^-1`` in the expansion of ``F_k`` at infinity.

    ``F_k = z^-t f_k`` decays like ``z^(M-N-r-t)``, so the coefficient is the
    leading coefficient times ``q_p`` with ``p = M-N-r-t+1`` (zero for
    ``p < 0``); ``q_p`` comes from :func:`fhat_coefficients`.  For ``t = 0`` this is the ``z^-1`` coefficient of ``f_k``.
    """
    if not isinstance(params, QParams):
        raise TypeError("c_minus1 needs len(b) == len(a)")
    _require_k(params, k)
    p = params.p_index
    if p < 0:
        return 0j
    return leading_coefficient(params, k) * fhat_coefficients(params, k, p)[p]


def residue_at_zero(params: HypergeometricParams, k: int) -> complex:
    """Residue of ``F_k`` at the origin, ``-p_(t-1)`` (zero for ``t <= 0``)."""
    if params.t <= 0:
        return 0j
    return -p_recurrence(params, k, params.t - 1)[params.t - 1]


def closure_residual(params: QParams, k: int) -> float:
    """Mismatch of ``alpha_k = C_-1(k) - res_0(k)`` relative to the magnitudes
    summed on either side: the gamma terms, ``|C_-1|`` and ``|res_0|``."""
    fk = RationalFk(params, k)
    residues = [residue_at_pole(fk, i, j) for i, j, _ in fk.poles]
    lhs = sum(residues, 0j)
    cm1 = c_minus1(params, k)
    r0 = residue_at_zero(params, k)
    scale = sum(abs(x) for x in residues) + abs(cm1) + abs(r0)
    if scale == 0:
        return 0.0
    return abs(lhs - (cm1 - r0)) / scale


def alpha_identity_sides(params: QParams, k: int) -> tuple[complex, complex]:
    """Terminating-series side and recurrence side of the alpha identity."""
    _require_k(params, k)
    lhs = alpha_phi_sum(params, k)
    rhs = c_minus1(params, k) - residue_at_zero(params, k)
    return lhs, rhs


def alpha_identity_check(params: QParams, k: int, tol: float = 1e-8, case_id: str = "alpha") -> ResidualReport:
    lhs, rhs = alpha_identity_sides(params, k)
    rec = CaseRecord.from_residuals(
        case_id,
        params.to_dict(),
        [relative_residual(lhs, rhs)],
        tol,
        detail={"k": k, "p_index": params.p_index, "lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag]},
    )
    return ResidualReport([rec])


# ----------------------------------------------------------------------
# contour integrals


def contour_coefficients(
    func: Callable[[complex], complex],
    radius: float,
    powers: Sequence[int],
    nodes: int = CONTOUR_NODES,
) -> list[complex]:
    """Laurent coefficients ``c_j`` of ``func`` on the annulus through
    ``|z| = radius`` by the trapezoidal rule: ``c_j = mean(f(z) z^-j)``."""
    theta = 2 * np.pi * np.arange(nodes) / nodes
    zs = radius * np.exp(1j * theta)
    vals = np.array([func(complex(z)) for z in zs])
    return [complex(np.mean(vals * zs ** (-j))) for j in powers]


def _pole_moduli(params: HypergeometricParams, k: int) -> list[float]:
    """Moduli of all zeros and poles of ``f_k``."""
    q = abs(params.q)
    out = []
    for ai, ni in zip(params.a, params.n):
        base = abs(params.qp(ai))
        lo, hi = sorted((0, k + ni + 1))
        out += [base * q ** (-j) for j in range(lo, hi)]
    for bl, ml in zip(params.b, params.m):
        base = abs(params.qp(bl - 1))
        lo, hi = sorted((0, k + ml))
        out += [base * q ** (-j) for j in range(lo, hi)]
    return out


def outer_radius(params: HypergeometricParams, k: int) -> float:
    """Circle radius enclosing every zero and pole of ``f_k`` with margin."""
    return 10 * max(_pole_moduli(params, k) + [1.0])


def inner_radius(params: HypergeometricParams, k: int) -> float:
    return 0.1 * min(_pole_moduli(params, k) + [1.0])


# ----------------------------------------------------------------------
# beta by sampling


def recover_beta_by_sampling(
    params: HypergeometricParams,
    tol: float = 1e-7,
    rng: np.random.Generator | None = None,
    radius: float | None = None,
    attempts: int = 5,
    dps: int = SAMPLING_DPS,
) -> BetaTable:
    """Recover ``beta_k`` from values of the left-hand side alone.

    ``G(z) = z^n_max * denominator(z) * lhs(z)`` is a polynomial of degree
    ``d = k_hi - k_lo``.  It is sampled at ``d + 1`` points ``radius * u_j``
    where the ``u_j`` are randomly rotated roots of unity, so the Vandermonde
    system in ``u`` is solved by an inverse DFT.  One more point, halfway
    between two nodes, checks the fit; up to ``attempts`` rotations are tried.

    Small coefficients can sit far below ``max |G|`` on any circle where the
    series converge, so ``G`` is evaluated with ``dps`` significant digits.
    """
    k_lo, k_hi = params.k_range
    if k_hi < k_lo:
        return BetaTable(k_lo, k_hi, {})
    if rng is None:
        rng = np.random.default_rng(0)
    if radius is None:
        radius = admissible_radius(params)
    d = k_hi - k_lo
    zeros = params.denominator_zeros()

    last = None
    for _ in range(attempts):
        phase = rng.uniform(0, 2 * np.pi)
        with working_precision(dps):
            nodes = [unit_root(j, d + 1) for j in range(d + 1)]
            start = radius * gmpy2.exp(mpc(0, phase))
            points = [start * u for u in nodes]
            points.append(start * unit_root(1, 2 * (d + 1)))
            if any(abs(complex(z) - z0) < POLE_TOL**0.5 for z in points for z0 in zeros):
                continue
            vals = scaled_lhs_mp(params, points, dps)
            coeffs = []
            for k in range(d + 1):
                acc = sum((v / nodes[(j * k) % (d + 1)] for j, v in enumerate(vals[:-1])), mpc(0))
                coeffs.append(acc / (d + 1) / start**k)
            fit = mpc(0)
            for c in reversed(coeffs):
                fit = fit * points[-1] + c
            scale = max(float(abs(v)) for v in vals) or 1e-300
            last = float(abs(vals[-1] - fit)) / scale
            if last <= tol:
                return BetaTable(k_lo, k_hi, {k_lo + j: complex(c) for j, c in enumerate(coeffs)})
    raise SamplingError(f"sampled polynomial fails its check point (relative misfit {last!r})")
