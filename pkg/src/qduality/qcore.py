"""q-arithmetic primitives.

All quantities are double-precision complex numbers.  Parameters that the
identities write as ``q**x`` are carried around as exponents ``x`` and turned
into values with :meth:`QBase.power`, which uses the principal logarithm of
``q``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

__all__ = [
    "INFINITY_TOL",
    "QBase",
    "QPochhammerValue",
    "as_base",
    "q_pochhammer",
    "qpoch",
    "qpoch_product",
    "q_pochhammer_inf",
    "q_gamma",
    "q_binomial",
    "gauss_expand",
    "d_coefficients",
]

# |1 - a/q^k| below this marks a negative-index q-Pochhammer as infinite
INFINITY_TOL = 1e-14
# |q^(z+k) - 1| below this is a pole of the q-Gamma function
GAMMA_POLE_TOL = 1e-10


@dataclass(frozen=True)
class QBase:
    """The base ``q`` of every q-series, with ``0 < |q| < 1``.

    ``precision`` is the working precision in bits.  Only IEEE double (53) is
    implemented; the field exists so that an extended-precision backend can
    be selected later without changing call sites.
    """

    q: complex
    precision: int = 53

    def __post_init__(self) -> None:
        q = complex(self.q)
        if q == 0:
            raise ValueError("q must be nonzero")
        if not abs(q) < 1:
            raise ValueError(f"|q| must be < 1, got |q| = {abs(q)!r}")
        if self.precision != 53:
            raise NotImplementedError("only double precision (53 bits) is available")
        object.__setattr__(self, "q", q)

    @cached_property
    def log_q(self) -> complex:
        return cmath.log(self.q)

    def power(self, x: complex) -> complex:
        """``q**x`` on the principal branch."""
        if x == 0:
            return 1.0 + 0j
        return cmath.exp(x * self.log_q)


QLike = Union[QBase, complex, float]


def as_base(q: QLike) -> QBase:
    return q if isinstance(q, QBase) else QBase(q)


@dataclass(frozen=True)
class QPochhammerValue:
    """A q-shifted factorial that may be infinite.

    An infinite value has reciprocal exactly zero; this is how terms with a
    ``(q;q)_j``, ``j < 0``, in the denominator vanish.
    """

    value: complex
    is_infinite: bool = False

    def reciprocal(self) -> complex:
        if self.is_infinite:
            return 0j
        if self.value == 0:
            raise ZeroDivisionError("reciprocal of a vanishing q-Pochhammer symbol")
        return 1 / self.value

    def __complex__(self) -> complex:
        if self.is_infinite:
            raise OverflowError("q-Pochhammer symbol is infinite")
        return complex(self.value)


_INF = QPochhammerValue(complex(math.inf, 0), True)


def q_pochhammer(a: complex, base: QLike, n: int) -> QPochhammerValue:
    """``(a;q)_n`` for any integer ``n``.

    For ``n < 0`` this is ``prod_{k=1}^{-n} 1/(1 - a/q^k)``; the result is
    flagged infinite when one of those factors is ``1/0``.
    """
    q = as_base(base).q
    n = int(n)
    if n >= 0:
        prod = 1 + 0j
        qk = 1 + 0j
        for _ in range(n):
            prod *= 1 - a * qk
            qk *= q
        return QPochhammerValue(prod)
    prod = 1 + 0j
    qinv = 1 / q
    qk = qinv
    for _ in range(-n):
        factor = 1 - a * qk
        if abs(factor) < INFINITY_TOL:
            return _INF
        prod *= factor
        qk *= qinv
    return QPochhammerValue(1 / prod)


def qpoch(a: complex, base: QLike, n: int) -> complex:
    """Finite ``(a;q)_n``; raises ``OverflowError`` when it is infinite."""
    return complex(q_pochhammer(a, base, n))


def qpoch_product(args: Sequence[complex], ns: Sequence[int], base: QLike) -> QPochhammerValue:
    """The vector symbol ``prod_i (a_i;q)_{n_i}``; infinite if any factor is."""
    if len(args) != len(ns):
        raise ValueError("parameter and index vectors differ in length")
    total = 1 + 0j
    for a, n in zip(args, ns):
        v = q_pochhammer(a, base, n)
        if v.is_infinite:
            return _INF
        total *= v.value
    return QPochhammerValue(total)


def q_pochhammer_inf(a: complex, base: QLike, tol: float = 1e-17) -> complex:
    """``(a;q)_inf`` with relative truncation error below ``tol``.

    The product stops at the first ``K`` with ``|a| |q|^K < tol (1 - |q|)``;
    the neglected factors then multiply to ``1 + O(tol)``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    q = as_base(base).q
    aq = complex(a)
    if aq == 0:
        return 1 + 0j
    absq = abs(q)
    threshold = tol * (1 - absq)
    prod = 1 + 0j
    while abs(aq) >= threshold:
        prod *= 1 - aq
        if prod == 0:
            return 0j
        aq *= q
    return prod


def q_gamma(z: complex, base: QLike) -> complex:
    """``Gamma_q(z) = (1-q)^(1-z) (q;q)_inf / (q^z;q)_inf``."""
    b = as_base(base)
    qz = b.power(z)
    # |q^(z+k)| decreases in k, so only terms with |q^(z+k)| > 1/2 can hit 1
    qzk = qz
    while abs(qzk) > 0.5:
        if abs(qzk - 1) < GAMMA_POLE_TOL:
            raise ValueError(f"Gamma_q has a pole at z = {z!r}")
        qzk *= b.q
    pref = cmath.exp((1 - z) * cmath.log(1 - b.q))
    return pref * q_pochhammer_inf(b.q, b) / q_pochhammer_inf(qz, b)


def q_binomial(n: int, j: int, base: QLike) -> complex:
    """Gaussian binomial ``[n choose j]_q``; zero outside ``0 <= j <= n``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if j < 0 or j > n:
        return 0j
    b = as_base(base)
    return qpoch(b.power(n - j + 1), b, j) / qpoch(b.q, b, j)


def gauss_expand(n: int, base: QLike) -> list[complex]:
    """Coefficients ``c_j`` with ``(a;q)_n = sum_j c_j a^j``."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    b = as_base(base)
    return [
        (-1) ** j * q_binomial(n, j, b) * b.power(j * (j - 1) / 2)
        for j in range(n + 1)
    ]


def d_coefficients(w: complex, p: int, t: int, base: QLike) -> list[complex]:
    """``D_j`` with ``(wz;q)_{p+1} (z;q)_{t+} = sum_j D_j (-z)^j``.

    ``w`` is the value ``W`` itself (not its exponent); ``p >= -1``.
    """
    if p < -1:
        raise ValueError("p must be >= -1")
    b = as_base(base)
    tp = max(t, 0)
    # (-1)^j c_j are the coefficients of (-x)^j in the Gauss expansion
    left = [(-1) ** h * c * w**h for h, c in enumerate(gauss_expand(p + 1, b))]
    right = [(-1) ** g * c for g, c in enumerate(gauss_expand(tp, b))]
    out = [0j] * (len(left) + len(right) - 1)
    for h, x in enumerate(left):
        for g, y in enumerate(right):
            out[h + g] += x * y
    return out
