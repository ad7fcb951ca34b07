"""Basic hypergeometric series.

``phi_eval`` sums the standard series ``r phi s`` (with the factor
``[(-1)^n q^(n(n-1)/2)]^(1+s-r)``) and ``phi_hat_eval`` the Bailey-Slater
series without it.  Both accumulate terms by their ratio and stop once a
geometric majorant certifies the discarded tail.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .qcore import QBase, QLike, as_base, q_pochhammer_inf, qpoch

__all__ = [
    "Variant",
    "PhiSpec",
    "SeriesTruncation",
    "SeriesDivergenceError",
    "LowerParameterPoleError",
    "phi_eval",
    "phi_hat_eval",
    "phi",
    "phi_hat",
    "terminating_order",
    "heine_transform",
    "limit_at_one",
    "one_minus_z_phi",
]

TERMINATION_RTOL = 1e-10
TERMINATION_CAP = 512
LOWER_POLE_TOL = 1e-13
MAX_TERMS = 200_000


class Variant(enum.Enum):
    STANDARD = "standard"
    BAILEY_SLATER = "bailey_slater"


class SeriesDivergenceError(ArithmeticError):
    """The requested series does not converge at the given argument."""


class LowerParameterPoleError(ZeroDivisionError):
    """A lower parameter equals ``q^-k`` and a term divides by zero."""


@dataclass(frozen=True)
class PhiSpec:
    upper: tuple[complex, ...]
    lower: tuple[complex, ...]
    base: QBase
    variant: Variant = Variant.STANDARD

    def __init__(
        self,
        upper: Sequence[complex],
        lower: Sequence[complex],
        base: QLike,
        variant: Variant | str = Variant.STANDARD,
    ) -> None:
        object.__setattr__(self, "upper", tuple(complex(u) for u in upper))
        object.__setattr__(self, "lower", tuple(complex(v) for v in lower))
        object.__setattr__(self, "base", as_base(base))
        object.__setattr__(self, "variant", Variant(variant))

    @property
    def r(self) -> int:
        return len(self.upper)

    @property
    def s(self) -> int:
        return len(self.lower)

    @property
    def sign_power(self) -> int:
        """Exponent of ``(-1)^n q^(n(n-1)/2)`` in the n-th term."""
        if self.variant is Variant.BAILEY_SLATER:
            return 0
        return 1 + self.s - self.r


@dataclass(frozen=True)
class SeriesTruncation:
    """Summation order ``K`` and a bound on ``|sum_{n>K} term_n|``."""

    order: int
    tail_bound: float
    terminating: bool = False


def terminating_order(upper: Sequence[complex], base: QLike) -> int | None:
    """Smallest ``N0`` such that some upper parameter is ``q^-N0``, if any."""
    q = as_base(base).q
    best = None
    for u in upper:
        target = 1 + 0j
        for n0 in range(TERMINATION_CAP + 1):
            if best is not None and n0 >= best:
                break
            if abs(u - target) < TERMINATION_RTOL * abs(target):
                best = n0
                break
            if abs(target) > 2 * abs(u):
                # |q^-n| only grows from here
                break
            target /= q
    return best


def _majorant_ratio(spec: PhiSpec, absz: float, n: int) -> float:
    """Upper bound on ``|term_{m+1}/term_m|`` for all ``m >= n``.

    Returns ``inf`` when no bound is available yet (a lower parameter is
    still too large in modulus).  The bound is nonincreasing in ``n``.
    """
    absq = abs(spec.base.q)
    qn = absq**n
    bound = absz / (1 - absq * qn)
    for u in spec.upper:
        bound *= 1 + abs(u) * qn
    for v in spec.lower:
        x = abs(v) * qn
        if x >= 1:
            return float("inf")
        bound /= 1 - x
    if spec.sign_power > 0:
        bound *= qn**spec.sign_power
    return bound


def _sum_series(spec: PhiSpec, z: complex, tol: float) -> tuple[complex, SeriesTruncation]:
    if not tol > 0:
        raise ValueError("tol must be positive")
    z = complex(z)
    q = spec.base.q
    if spec.sign_power < 0 and z != 0:
        stop = terminating_order(spec.upper, spec.base)
        if stop is None:
            raise SeriesDivergenceError(
                f"{spec.r}phi{spec.s} ({spec.variant.value}) diverges for z != 0"
            )
    if z == 0:
        return 1 + 0j, SeriesTruncation(0, 0.0, True)

    stop = terminating_order(spec.upper, spec.base)
    if stop is None and spec.sign_power == 0 and abs(z) >= 1:
        raise SeriesDivergenceError(f"series needs |z| < 1, got |z| = {abs(z)!r}")

    sign = (-1) ** spec.sign_power
    absz = abs(z)
    term = 1 + 0j
    total = 1 + 0j
    qn = 1 + 0j  # q^n
    signq = 1 + 0j  # q^(n * sign_power), the factor added when going n -> n+1
    n = 0
    while True:
        if stop is not None and n >= stop:
            return total, SeriesTruncation(n, 0.0, True)
        num = 1 + 0j
        for u in spec.upper:
            num *= 1 - u * qn
        den = 1 - qn * q
        for v in spec.lower:
            f = 1 - v * qn
            if abs(f) < LOWER_POLE_TOL:
                raise LowerParameterPoleError(
                    f"lower parameter {v!r} is q^-{n}; term {n + 1} is undefined"
                )
            den *= f
        ratio = num / den * z
        if spec.sign_power:
            ratio *= sign * signq
            signq *= q**spec.sign_power
        term *= ratio
        total += term
        n += 1
        qn *= q
        if stop is None:
            rho = _majorant_ratio(spec, absz, n)
            if rho < 1:
                # next term is bounded by |term| * rho, and so on geometrically
                tail = abs(term) * rho / (1 - rho)
                if tail <= tol * max(1.0, abs(total)):
                    return total, SeriesTruncation(n, tail)
        if n > MAX_TERMS:
            raise SeriesDivergenceError(f"no convergence after {MAX_TERMS} terms")


def phi_eval(spec: PhiSpec, z: complex, tol: float = 1e-17) -> tuple[complex, SeriesTruncation]:
    """Sum ``spec`` at ``z``; returns the value and its truncation record.

    If an upper parameter is ``q^-N0`` the sum stops exactly at ``n = N0``
    and the tail bound is zero.
    """
    return _sum_series(spec, z, tol)


def phi_hat_eval(spec: PhiSpec, z: complex, tol: float = 1e-17) -> tuple[complex, SeriesTruncation]:
    """Bailey-Slater series: as :func:`phi_eval` without the sign/q-power factor."""
    if spec.variant is not Variant.BAILEY_SLATER:
        spec = PhiSpec(spec.upper, spec.lower, spec.base, Variant.BAILEY_SLATER)
    return _sum_series(spec, z, tol)


def phi(upper: Sequence[complex], lower: Sequence[complex], base: QLike, z: complex) -> complex:
    return phi_eval(PhiSpec(upper, lower, base), z)[0]


def phi_hat(upper: Sequence[complex], lower: Sequence[complex], base: QLike, z: complex) -> complex:
    return phi_hat_eval(PhiSpec(upper, lower, base, Variant.BAILEY_SLATER), z)[0]


def heine_transform(a: complex, b: complex, c: complex, z: complex, base: QLike) -> complex:
    """Right-hand side of Heine's transformation of ``2phi1(q^a, q^b; q^c; z)``."""
    bq = as_base(base)
    w = bq.power(a + b - c) * z
    if abs(z) >= 1 or abs(w) >= 1:
        raise SeriesDivergenceError("Heine's transformation needs |z| < 1 and |q^(a+b-c) z| < 1")
    pref = q_pochhammer_inf(w, bq) / q_pochhammer_inf(z, bq)
    return pref * phi((bq.power(c - a), bq.power(c - b)), (bq.power(c),), bq, w)


def limit_at_one(spec: PhiSpec) -> complex:
    """``lim_{z -> 1-} (1 - z) r phi r-1 (z)`` as a ratio of infinite products."""
    if spec.r != spec.s + 1:
        raise ValueError("limit_at_one needs r = s + 1")
    if spec.variant is not Variant.STANDARD:
        raise ValueError("limit_at_one needs the standard variant")
    b = spec.base
    for v in spec.lower:
        qk = 1 + 0j
        while abs(v * qk) > 0.5:
            if abs(1 - v * qk) < LOWER_POLE_TOL:
                raise LowerParameterPoleError(f"lower parameter {v!r} is a nonpositive power of q")
            qk *= b.q
    num = 1 + 0j
    for v in spec.upper:
        num *= q_pochhammer_inf(v, b)
    den = q_pochhammer_inf(b.q, b)
    for w in spec.lower:
        den *= q_pochhammer_inf(w, b)
    return num / den


def one_minus_z_phi(spec: PhiSpec, z: complex, tol: float = 1e-15) -> complex:
    """``(1 - z) r phi r-1 (z)`` for ``|z| <= 1``, usable right up to ``z = 1``.

    With ``c_n`` the coefficients of the series this is
    ``sum_n (c_n - c_(n-1)) z^n``.  The differences shrink like ``|q|^n``
    whatever ``z`` is, while the plain series needs about ``1/(1-|z|)``
    terms.
    """
    if spec.r != spec.s + 1 or spec.variant is not Variant.STANDARD:
        raise ValueError("one_minus_z_phi needs a standard r phi r-1")
    z = complex(z)
    if abs(z) > 1:
        raise SeriesDivergenceError(f"need |z| <= 1, got |z| = {abs(z)!r}")
    q = spec.base.q
    absq = abs(q)
    size = sum(abs(u) for u in spec.upper) + sum(abs(v) for v in spec.lower) + 1
    coeff = 1 + 0j
    zn = 1 + 0j
    total = 1 + 0j
    qn = 1 + 0j
    for n in range(MAX_TERMS):
        num = 1 + 0j
        for u in spec.upper:
            num *= 1 - u * qn
        den = 1 - qn * q
        for v in spec.lower:
            f = 1 - v * qn
            if abs(f) < LOWER_POLE_TOL:
                raise LowerParameterPoleError(f"lower parameter {v!r} is q^-{n}")
            den *= f
        nxt = coeff * num / den
        zn *= z
        total += (nxt - coeff) * zn
        coeff = nxt
        qn *= q
        # |c_(m+1) - c_m| <= |c_m| * O(size |q|^m): a geometric tail
        x = size * absq ** (n + 1)
        if x < 0.5 and abs(coeff) * 2 * x / (1 - absq) <= tol * max(1.0, abs(total)):
            return total
    raise SeriesDivergenceError(f"no convergence after {MAX_TERMS} terms")
