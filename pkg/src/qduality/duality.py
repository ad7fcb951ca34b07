"""Duality relation for sums of products of ``r phi r-1`` series.

For exponent vectors ``a``, ``b`` and integer vectors ``m``, ``n`` and shift
``t`` the bilinear sum computed by :func:`lhs_eval` equals the Laurent
polynomial ``sum_k beta_k z^k`` divided by ``(Wz;q)_{p+1} (z;q)_{t+}``.
The coefficients come from :func:`beta_table`.

Index ``i`` is zero-based throughout (``0 <= i < r``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np

from .qcore import (
    QBase,
    QLike,
    as_base,
    d_coefficients,
    q_binomial,
    q_pochhammer,
    q_pochhammer_inf,
    qpoch,
    qpoch_product,
)
from .qseries import PhiSpec, Variant, phi_eval
from .report import CaseRecord, ResidualReport, relative_residual

__all__ = [
    "EPS_INT",
    "ILL_CONDITIONED_RATIO",
    "DegenerateParametersError",
    "AlphaCrossCheckError",
    "HypergeometricParams",
    "QParams",
    "BetaTable",
    "gamma_coeff",
    "alpha_coeff",
    "alpha_double_sum",
    "alpha_phi_sum",
    "beta_table",
    "lhs_terms",
    "lhs_eval",
    "rhs_eval",
    "admissible_radius",
    "sample_admissible_z",
    "theorem1_residual",
    "summation_sides",
    "prop1_sides",
    "prop1_check",
    "random_exponents",
]

EPS_INT = 1e-6
ILL_CONDITIONED_RATIO = 1e6
ALPHA_CROSSCHECK_TOL = 1e-10
SERIES_TOL = 1e-17
BETA_DPS = 60


class DegenerateParametersError(ValueError):
    """Parameters violate a hypothesis or hit a singular q-Pochhammer symbol."""


class AlphaCrossCheckError(ArithmeticError):
    """The two evaluations of ``alpha_k`` disagree."""


def _int_distance(x: complex) -> float:
    """Distance of ``x`` from the integers, or ``inf`` if ``Im x`` is not small."""
    if abs(x.imag) >= EPS_INT:
        return math.inf
    return abs(x.real - round(x.real))


@dataclass(frozen=True)
class HypergeometricParams:
    """Exponents ``a`` (length r), ``b`` (length s), integers ``m`` (length
    s), ``n`` (length r) and ``t``, with base ``q``.

    Shared by the two duality theorems.  The only hypothesis checked is that
    no difference ``a_i - a_j`` is an integer.
    """

    base: QBase
    a: tuple[complex, ...]
    b: tuple[complex, ...]
    m: tuple[int, ...]
    n: tuple[int, ...]
    t: int

    def __init__(
        self,
        a: Sequence[complex],
        b: Sequence[complex],
        m: Sequence[int],
        n: Sequence[int],
        t: int,
        q: QLike,
    ) -> None:
        object.__setattr__(self, "base", as_base(q))
        object.__setattr__(self, "a", tuple(complex(x) for x in a))
        object.__setattr__(self, "b", tuple(complex(x) for x in b))
        object.__setattr__(self, "m", tuple(_as_int(x) for x in m))
        object.__setattr__(self, "n", tuple(_as_int(x) for x in n))
        object.__setattr__(self, "t", _as_int(t))
        self._validate()

    def _validate(self) -> None:
        if len(self.m) != len(self.b):
            raise ValueError("m and b must have the same length")
        if len(self.n) != len(self.a):
            raise ValueError("n and a must have the same length")
        for i in range(self.r):
            for j in range(i + 1, self.r):
                if _int_distance(self.a[i] - self.a[j]) < EPS_INT:
                    raise DegenerateParametersError(
                        f"a[{i}] - a[{j}] = {self.a[i] - self.a[j]!r} is (nearly) an integer"
                    )

    # derived quantities
    @property
    def q(self) -> complex:
        return self.base.q

    @property
    def r(self) -> int:
        return len(self.a)

    @property
    def s(self) -> int:
        return len(self.b)

    @property
    def M(self) -> int:
        return sum(self.m)

    @property
    def N(self) -> int:
        return sum(self.n)

    @property
    def m_min(self) -> int | None:
        return min(self.m) if self.m else None

    @property
    def n_max(self) -> int:
        return max(self.n)

    @property
    def t_plus(self) -> int:
        return max(self.t, 0)

    @property
    def w_exponent(self) -> complex:
        return self.t + self.r - 1 + sum(self.a) - sum(self.b)

    @cached_property
    def W(self) -> complex:
        return self.base.power(self.w_exponent)

    def qp(self, x: complex) -> complex:
        """``q**x``."""
        return self.base.power(x)

    def phi_argument_factor(self, i: int) -> complex:
        """Multiplier of ``z`` in the first series of term ``i``."""
        return self.W * self.qp((self.s - self.r) * self.a[i])

    def others(self, i: int) -> list[int]:
        return [l for l in range(self.r) if l != i]

    # subclass hooks
    @property
    def k_range(self) -> tuple[int, int]:
        raise NotImplementedError

    @property
    def w_factor_length(self) -> int:
        """Length of the ``(Wz;q)`` factor in the right-hand denominator."""
        raise NotImplementedError

    def rhs_denominator(self, z: complex) -> complex:
        raise NotImplementedError

    def d_coeffs(self) -> list[complex]:
        raise NotImplementedError

    def summation_denominator(self) -> complex:
        raise NotImplementedError

    def denominator_zeros(self) -> list[complex]:
        return []

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": _cplx(self.q),
            "a": [_cplx(x) for x in self.a],
            "b": [_cplx(x) for x in self.b],
            "m": list(self.m),
            "n": list(self.n),
            "t": self.t,
        }


def _as_int(x: Any) -> int:
    if isinstance(x, bool) or int(x) != x:
        raise TypeError(f"expected an integer, got {x!r}")
    return int(x)


def _cplx(x: complex) -> list[float]:
    return [float(x.real), float(x.imag)]


class QParams(HypergeometricParams):
    """Parameters of the ``r phi r-1`` duality (``len(b) == len(a) == r >= 2``)."""

    def _validate(self) -> None:
        if self.r < 2:
            raise ValueError("need r >= 2")
        if self.s != self.r:
            raise ValueError("a and b must both have length r")
        super()._validate()

    @property
    def p(self) -> int:
        return max(-1, self.M - self.N - self.r - self.t + 1)

    @property
    def p_index(self) -> int:
        """``M - N - r - t + 1`` before clamping at -1."""
        return self.M - self.N - self.r - self.t + 1

    @property
    def k_range(self) -> tuple[int, int]:
        return -self.n_max, self.p + self.t_plus - self.m_min

    @property
    def w_factor_length(self) -> int:
        return self.p + 1

    def rhs_denominator(self, z: complex) -> complex:
        return qpoch(self.W * z, self.base, self.p + 1) * qpoch(z, self.base, self.t_plus)

    def denominator_zeros(self) -> list[complex]:
        zs = [1 / (self.W * self.q**j) for j in range(self.p + 1)]
        zs += [1 / self.q**j for j in range(self.t_plus)]
        return zs

    def d_coeffs(self) -> list[complex]:
        return d_coefficients(self.W, self.p, self.t, self.base)

    def summation_denominator(self) -> complex:
        return qpoch(self.W, self.base, self.p + 1)


@dataclass(frozen=True)
class BetaTable:
    """Laurent coefficients ``beta_k`` for ``k_lo <= k <= k_hi``."""

    k_lo: int
    k_hi: int
    coeffs: dict[int, complex] = field(default_factory=dict)

    def __getitem__(self, k: int) -> complex:
        if k < self.k_lo or k > self.k_hi:
            raise KeyError(k)
        return self.coeffs[k]

    def __len__(self) -> int:
        return max(0, self.k_hi - self.k_lo + 1)

    def __iter__(self):
        return iter(range(self.k_lo, self.k_hi + 1))

    def items(self):
        return [(k, self.coeffs[k]) for k in self]

    def evaluate(self, z: complex) -> complex:
        return sum((c * z**k for k, c in self.items()), 0j)

    def total(self) -> complex:
        return sum(self.coeffs.values(), 0j)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k_lo": self.k_lo,
            "k_hi": self.k_hi,
            "coeffs": {str(k): _cplx(c) for k, c in self.items()},
        }


# ----------------------------------------------------------------------
# gamma / alpha / beta


def gamma_coeff(params: HypergeometricParams, i: int, j: int, k: int) -> complex:
    """``gamma_{i,j}^{k+n_i}``, the coefficient of ``z^k`` contributed by term
    ``i`` of the bilinear sum through the ``j``-th term of its first series.

    Zero for ``j < 0`` or ``j > k + n_i``.
    """
    if not 0 <= i < params.r:
        raise IndexError(i)
    top = k + params.n[i]
    if j < 0 or j > top:
        return 0j
    ai = params.a[i]
    base = params.base
    num = qpoch_product([params.qp(1 - bl + ai - j) for bl in params.b], [ml + k for ml in params.m], base)
    if num.is_infinite:
        raise DegenerateParametersError(f"numerator of gamma_({i},{j})^{top} is infinite")
    others = params.others(i)
    den = qpoch_product([params.qp(ai - params.a[l] - j) for l in others], [params.n[l] + k + 1 for l in others], base)
    if not den.is_infinite and den.value == 0:
        raise DegenerateParametersError(f"denominator of gamma_({i},{j})^{top} vanishes")
    den_val = den.reciprocal()
    qq = q_pochhammer(base.q, base, j).value * q_pochhammer(base.q, base, top - j).value
    expo = j * (j - 1) / 2 + ai * (1 - params.t) + params.t * j
    return (-1) ** j * params.qp(expo) * num.value * den_val / qq


def alpha_double_sum(params: HypergeometricParams, k: int) -> tuple[complex, float]:
    """``alpha_k`` as the double sum of gamma coefficients, with the sum of
    absolute values of its terms."""
    total = 0j
    scale = 0.0
    for i in range(params.r):
        for j in range(k + params.n[i] + 1):
            g = gamma_coeff(params, i, j, k)
            total += g
            scale += abs(g)
    return total, scale


def _alpha_prefactor(params: HypergeometricParams, i: int, k: int) -> complex:
    ai = params.a[i]
    base = params.base
    num = qpoch_product([params.qp(1 - bl + ai) for bl in params.b], [ml + k for ml in params.m], base)
    if num.is_infinite:
        raise DegenerateParametersError(f"alpha prefactor {i} at k={k} is infinite")
    others = params.others(i)
    den = qpoch_product([params.qp(ai - params.a[l]) for l in others], [params.n[l] + k + 1 for l in others], base)
    return params.qp(ai * (1 - params.t)) * num.value * den.reciprocal() / qpoch(base.q, base, k + params.n[i])


def alpha_phi_spec(params: HypergeometricParams, i: int, k: int) -> tuple[PhiSpec, complex]:
    """The terminating ``(r+s) phi (r+s-1)`` whose value times the prefactor
    is the ``i``-th part of ``alpha_k``; returns the spec and its argument."""
    ai = params.a[i]
    others = params.others(i)
    qp = params.qp
    upper = [qp(-k - params.n[i])]
    upper += [qp(bl - ai) for bl in params.b]
    upper += [qp(params.a[l] - ai - params.n[l] - k) for l in others]
    lower = [qp(bl - ai - ml - k) for bl, ml in zip(params.b, params.m)]
    lower += [qp(1 - ai + params.a[l]) for l in others]
    arg = qp(params.N - params.M + params.r - 1 + params.t + k * (params.r - params.s))
    return PhiSpec(upper, lower, params.base), arg


def alpha_phi_sum(params: HypergeometricParams, k: int) -> complex:
    """``alpha_k`` through terminating basic hypergeometric sums."""
    total = 0j
    for i in range(params.r):
        if k + params.n[i] < 0:
            continue
        spec, arg = alpha_phi_spec(params, i, k)
        val, trunc = phi_eval(spec, arg)
        if not trunc.terminating:
            raise ArithmeticError("alpha series failed to terminate")
        total += _alpha_prefactor(params, i, k) * val
    return total


def alpha_coeff(params: HypergeometricParams, k: int, check: bool = True) -> complex:
    """``alpha_k``, the coefficient of ``z^k`` in the expansion of the
    bilinear sum about ``z = 0``.

    With ``check`` set the double-sum and hypergeometric-sum routes are
    compared and :class:`AlphaCrossCheckError` is raised when they differ by
    more than ``1e-10`` of the summed term magnitudes.
    """
    if k < -params.n_max:
        return 0j
    value, scale = alpha_double_sum(params, k)
    if check:
        other = alpha_phi_sum(params, k)
        if abs(value - other) > ALPHA_CROSSCHECK_TOL * max(scale, abs(value), 1e-300):
            raise AlphaCrossCheckError(f"alpha_{k}: double sum {value!r} vs phi sum {other!r}")
    return value


def _d_literal(params: QParams) -> list[complex]:
    """``D_j`` from the explicit double sum over ``g + h = j``."""
    tp = params.t_plus
    base = params.base
    out = []
    for j in range(params.p + 2 + tp):
        acc = 0j
        for h in range(j + 1):
            g = j - h
            acc += (
                q_binomial(params.p + 1, h, base)
                * q_binomial(tp, g, base)
                * params.qp((h * (h - 1) + g * (g - 1)) / 2)
                * params.W**h
            )
        out.append(acc)
    return out


def _beta_mp(params: HypergeometricParams, dps: int, total: bool = False):
    # deferred: the extended-precision module builds on this one
    from .extended import beta_coefficients_mp, beta_total_mp

    return beta_total_mp(params, dps) if total else beta_coefficients_mp(params, dps)


def beta_table(
    params: HypergeometricParams,
    literal: bool = False,
    check: bool = True,
    dps: int | None = BETA_DPS,
) -> BetaTable:
    """Coefficients of the Laurent polynomial on the right of the identity.

    ``beta_k = sum_j (-1)^(k-j) D_(k-j) alpha_j``.  The top coefficients can
    be many orders below the terms they are summed from, so by default the
    sums are carried out with ``dps`` decimal digits and rounded at the end;
    ``dps=None`` keeps everything in double precision.  ``literal`` rebuilds
    the ``D_j`` from their explicit q-binomial double sum instead of the
    Gauss expansion (double precision, :class:`QParams` only).  With
    ``check`` set each ``alpha_j`` is cross-checked in double precision.
    """
    k_lo, k_hi = params.k_range
    if literal:
        if not isinstance(params, QParams):
            raise TypeError("literal D_j are defined for QParams only")
        dps = None
    alphas = {j: alpha_coeff(params, j, check=check) for j in range(k_lo, k_hi + 1)}
    if dps is not None:
        return BetaTable(k_lo, k_hi, {k: complex(v) for k, v in _beta_mp(params, dps).items()})
    d = _d_literal(params) if literal else params.d_coeffs()
    top = len(d) - 1
    coeffs = {}
    for k in range(k_lo, k_hi + 1):
        acc = 0j
        for j in range(max(k_lo, k - top), k + 1):
            acc += (-1) ** (k - j) * d[k - j] * alphas[j]
        coeffs[k] = acc
    return BetaTable(k_lo, k_hi, coeffs)


# ----------------------------------------------------------------------
# the two sides


def _lhs_prefactor(params: HypergeometricParams, i: int) -> complex:
    ai = params.a[i]
    ni = params.n[i]
    base = params.base
    num = qpoch_product([params.qp(1 - bl + ai) for bl in params.b], [ml - ni for ml in params.m], base)
    if num.is_infinite:
        raise DegenerateParametersError(f"prefactor of term {i} is infinite")
    others = params.others(i)
    den = qpoch_product([params.qp(ai - params.a[l]) for l in others], [params.n[l] - ni + 1 for l in others], base)
    return params.qp(ai * (1 - params.t)) * num.value * den.reciprocal()


def lhs_series_specs(params: HypergeometricParams, i: int) -> tuple[PhiSpec, PhiSpec]:
    """The two series multiplied in term ``i``: the first is evaluated at
    ``phi_argument_factor(i) * z``, the second (Bailey-Slater) at ``z``."""
    ai = params.a[i]
    ni = params.n[i]
    others = params.others(i)
    qp = params.qp
    first = PhiSpec(
        [qp(bl - ai) for bl in params.b],
        [qp(1 + params.a[l] - ai) for l in others],
        params.base,
    )
    second = PhiSpec(
        [qp(1 - bl + ai + ml - ni) for bl, ml in zip(params.b, params.m)],
        [qp(1 - params.a[l] + ai + params.n[l] - ni) for l in others],
        params.base,
        Variant.BAILEY_SLATER,
    )
    return first, second


def lhs_terms(params: HypergeometricParams, z: complex, tol: float = SERIES_TOL) -> list[complex]:
    """The ``r`` summands of the left-hand side at ``z``."""
    z = complex(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    out = []
    for i in range(params.r):
        first, second = lhs_series_specs(params, i)
        v1, _ = phi_eval(first, params.phi_argument_factor(i) * z, tol)
        v2, _ = phi_eval(second, z, tol)
        out.append(_lhs_prefactor(params, i) * z ** (-params.n[i]) * v1 * v2)
    return out


def lhs_eval(params: HypergeometricParams, z: complex, tol: float = SERIES_TOL) -> complex:
    """Left-hand side: the bilinear sum of products of two series."""
    return sum(lhs_terms(params, z, tol), 0j)


def rhs_eval(params: HypergeometricParams, z: complex, table: BetaTable | None = None) -> complex:
    """Right-hand side: ``sum_k beta_k z^k`` over the denominator."""
    z = complex(z)
    if z == 0:
        raise ValueError("z must be nonzero")
    if table is None:
        table = beta_table(params)
    den = params.rhs_denominator(z)
    if abs(den) < 1e-300:
        raise ZeroDivisionError(f"z = {z!r} is a pole of the right-hand side")
    return table.evaluate(z) / den


# ----------------------------------------------------------------------
# sampling and residuals

MIN_ABS_Z = 0.05
MIN_POLE_DISTANCE = 0.05
MAX_Z_DRAWS = 100_000


def admissible_radius(params: HypergeometricParams) -> float:
    """Radius of the disk in which the identity is evaluated."""
    scale = max(abs(params.phi_argument_factor(i)) for i in range(params.r))
    return 0.4 / max(1.0, scale)


def sample_admissible_z(params: HypergeometricParams, rng: np.random.Generator, count: int) -> list[complex]:
    """Random points ``z`` with ``|z| <= admissible_radius`` away from the
    denominator zeros and from the origin.

    The inner radius is ``0.05`` when the disk allows it and half the disk
    radius otherwise.
    """
    radius = admissible_radius(params)
    inner = MIN_ABS_Z if radius > 2 * MIN_ABS_Z else radius / 2
    # the disk shrinks with |W| and so do the gaps to the zeros of (Wz;q)
    gap = MIN_POLE_DISTANCE * min(1.0, radius / 0.4)
    zeros = params.denominator_zeros()
    out: list[complex] = []
    for _ in range(MAX_Z_DRAWS):
        if len(out) == count:
            return out
        rho = rng.uniform(inner, radius)
        theta = rng.uniform(0, 2 * np.pi)
        z = complex(rho * np.cos(theta), rho * np.sin(theta))
        if any(abs(z - z0) < gap for z0 in zeros):
            continue
        out.append(z)
    if len(out) == count:
        return out
    raise RuntimeError(f"no admissible z after {MAX_Z_DRAWS} draws")


def identity_residual(
    params: HypergeometricParams,
    z_samples: Sequence[complex],
    tol: float,
    case_id: str = "case",
    table: BetaTable | None = None,
) -> ResidualReport:
    """Evaluate both sides at each sample and classify the case."""
    if table is None:
        table = beta_table(params)
    residuals, flags = [], []
    for z in z_samples:
        terms = lhs_terms(params, z)
        lhs = sum(terms, 0j)
        rhs = rhs_eval(params, z, table)
        residuals.append(relative_residual(lhs, rhs))
        biggest = max(abs(x) for x in terms)
        flags.append(biggest > ILL_CONDITIONED_RATIO * abs(lhs))
    rec = CaseRecord.from_residuals(
        case_id,
        params.to_dict(),
        residuals,
        tol,
        flags,
        {"z": [_cplx(complex(z)) for z in z_samples]},
    )
    return ResidualReport([rec])


def theorem1_residual(
    params: QParams, z_samples: Sequence[complex], tol: float = 1e-8, case_id: str = "theorem1"
) -> ResidualReport:
    """Relative residual of the duality identity at each ``z``; failures are
    reported, not raised."""
    return identity_residual(params, z_samples, tol, case_id)


def summation_sides(params: HypergeometricParams) -> tuple[complex, complex, float]:
    """Both sides of the ``z -> 1`` summation formula and the largest
    modulus among the left-hand terms.

    The right-hand side is ``(q^t;q)_inf sum_k beta_k`` divided by
    ``params.summation_denominator()``; it is exactly zero for ``t <= 0``.
    """
    base = params.base
    terms = []
    for i in range(params.r):
        ai = params.a[i]
        num = 1 + 0j
        for bl in params.b:
            num *= q_pochhammer_inf(params.qp(1 - bl + ai), base)
        den = 1 + 0j
        for l in params.others(i):
            den *= q_pochhammer_inf(params.qp(ai - params.a[l]), base)
        first, _ = lhs_series_specs(params, i)
        val, _ = phi_eval(first, params.phi_argument_factor(i))
        terms.append(params.qp(ai * (1 - params.t)) * num / den * val)
    lhs = sum(terms, 0j)
    if params.t <= 0:
        rhs = 0j
    else:
        # the beta_k can be far larger than their sum, so add them before rounding
        total = _beta_mp(params, BETA_DPS, total=True)
        rhs = q_pochhammer_inf(params.qp(params.t), base) * total
        rhs /= params.summation_denominator()
    return lhs, rhs, max(abs(x) for x in terms)


def prop1_sides(params: QParams) -> tuple[complex, complex, float]:
    if not abs(params.W) < 1:
        raise ValueError(f"need |W| < 1, got |W| = {abs(params.W)!r}")
    return summation_sides(params)


def summation_record(lhs: complex, rhs: complex, scale: float, t: int, tol: float, case_id: str, params: dict) -> CaseRecord:
    """For ``t <= 0`` the residual is ``|lhs| / scale``; otherwise the usual
    relative residual."""
    if t <= 0:
        res = abs(lhs) / max(scale, 1e-300)
    else:
        res = relative_residual(lhs, rhs)
    return CaseRecord.from_residuals(
        case_id, params, [res], tol, detail={"lhs": _cplx(lhs), "rhs": _cplx(rhs), "scale": scale}
    )


def prop1_check(params: QParams, tol: float = 1e-8, case_id: str = "prop1") -> ResidualReport:
    lhs, rhs, scale = prop1_sides(params)
    return ResidualReport([summation_record(lhs, rhs, scale, params.t, tol, case_id, params.to_dict())])


# ----------------------------------------------------------------------
# random parameters


def random_exponents(
    rng: np.random.Generator,
    count: int,
    spacing: float = 0.05,
    imag: float = 0.0,
    avoid: Sequence[complex] = (),
    avoid_spacing: float = 0.02,
) -> list[complex]:
    """Exponents with real part uniform in (0, 2), pairwise at least
    ``spacing`` apart modulo 1 and at least ``avoid_spacing`` from
    ``avoid`` modulo 1."""

    def mod1_dist(x: float, y: float) -> float:
        d = (x - y) % 1.0
        return min(d, 1 - d)

    out: list[complex] = []
    while len(out) < count:
        re = float(rng.uniform(0, 2))
        im = float(rng.uniform(-imag, imag)) if imag > 0 else 0.0
        if any(mod1_dist(re, o.real) < spacing for o in out):
            continue
        if any(mod1_dist(re, o.real) < avoid_spacing for o in avoid):
            continue
        out.append(complex(re, im))
    return out
