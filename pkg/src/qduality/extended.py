"""Extended-precision evaluation on top of ``gmpy2`` (MPFR/MPC).

Every ``q``-power is rebuilt from its exponent at the working precision, so
relations such as ``W = q^(t+r-1+sum(a)-sum(b))`` hold to that precision
rather than to double rounding.  The smallest Laurent coefficients of the
right-hand side arise from heavy cancellation, both when they are assembled
from gamma sums and when they are read off sampled values.

Precision is given in decimal digits (``dps``) and converted to bits.
"""
from __future__ import annotations

import math
from contextlib import contextmanager
from typing import Iterator

import gmpy2
from gmpy2 import mpc

from .duality import HypergeometricParams, lhs_series_specs
from .qseries import SeriesDivergenceError, _majorant_ratio, terminating_order

__all__ = [
    "working_precision",
    "to_mpc",
    "unit_root",
    "lhs_eval_mp",
    "scaled_lhs_mp",
    "beta_coefficients_mp",
    "beta_total_mp",
]

MAX_TERMS = 20_000


@contextmanager
def working_precision(dps: int) -> Iterator[None]:
    bits = math.ceil(dps * math.log2(10)) + 8
    with gmpy2.context(gmpy2.get_context(), precision=bits, real_prec=bits, imag_prec=bits):
        yield


def to_mpc(x) -> mpc:
    return x if isinstance(x, mpc) else mpc(complex(x))


def unit_root(num: int, den: int) -> mpc:
    """``exp(2 pi i num / den)`` at the working precision."""
    return gmpy2.exp(mpc(0, 2 * gmpy2.const_pi() * num / den))


def _poch(x: mpc, q: mpc, n: int) -> mpc:
    prod = mpc(1)
    if n >= 0:
        qj = mpc(1)
        for _ in range(n):
            prod *= 1 - x * qj
            qj *= q
        return prod
    qj = mpc(1)
    for _ in range(-n):
        qj /= q
        prod *= 1 - x * qj
    return 1 / prod


class _Context:
    def __init__(self, params: HypergeometricParams):
        self.params = params
        self.q = to_mpc(params.q)
        self.log_q = gmpy2.log(self.q)
        self.a = [to_mpc(x) for x in params.a]
        self.b = [to_mpc(x) for x in params.b]
        w = params.t + params.r - 1 + sum(self.a, mpc(0)) - sum(self.b, mpc(0))
        self.W = self.qp(w)

    def qp(self, x) -> mpc:
        return gmpy2.exp(x * self.log_q)

    def prefactor(self, i: int) -> mpc:
        p, a, b, q = self.params, self.a, self.b, self.q
        value = self.qp(a[i] * (1 - p.t))
        for bl, ml in zip(b, p.m):
            value *= _poch(self.qp(1 - bl + a[i]), q, ml - p.n[i])
        for l in p.others(i):
            value /= _poch(self.qp(a[i] - a[l]), q, p.n[l] - p.n[i] + 1)
        return value

    def series_parameters(self, i: int):
        p, a, b = self.params, self.a, self.b
        others = p.others(i)
        first = ([self.qp(bl - a[i]) for bl in b], [self.qp(1 + a[l] - a[i]) for l in others])
        second = (
            [self.qp(1 - bl + a[i] + ml - p.n[i]) for bl, ml in zip(b, p.m)],
            [self.qp(1 - a[l] + a[i] + p.n[l] - p.n[i]) for l in others],
        )
        return first, second

    def argument_factor(self, i: int) -> mpc:
        return self.W * self.qp((self.params.s - self.params.r) * self.a[i])

    def gamma(self, i: int, j: int, k: int) -> mpc:
        p, a, b, q = self.params, self.a, self.b, self.q
        top = k + p.n[i]
        value = (-1) ** j * self.qp(gmpy2.mpfr(j * (j - 1)) / 2 + a[i] * (1 - p.t) + p.t * j)
        for bl, ml in zip(b, p.m):
            value *= _poch(self.qp(1 - bl + a[i] - j), q, ml + k)
        for l in p.others(i):
            value /= _poch(self.qp(a[i] - a[l] - j), q, p.n[l] + k + 1)
        return value / (_poch(q, q, j) * _poch(q, q, top - j))

    def alpha(self, k: int) -> mpc:
        p = self.params
        return sum((self.gamma(i, j, k) for i in range(p.r) for j in range(k + p.n[i] + 1)), mpc(0))

    def d_coefficients(self) -> list[mpc]:
        """``D_j`` with ``(Wz;q)_L (z;q)_{t+} = sum_j D_j (-z)^j``."""
        roots = [self.W * self.q**j for j in range(self.params.w_factor_length)]
        roots += [self.q**j for j in range(self.params.t_plus)]
        poly = [mpc(1)]
        for c in roots:
            # multiply by (1 + c x) with x = -z
            poly = [x + c * y for x, y in zip(poly + [mpc(0)], [mpc(0)] + poly)]
        return poly


def _sum(spec, upper: list[mpc], lower: list[mpc], z: mpc, q: mpc) -> mpc:
    """Sum a series given its double-precision ``spec`` (for the sign
    convention, termination and the tail majorant) and exact parameters."""
    eps = 2.0 ** (-gmpy2.get_context().precision)
    stop = terminating_order(spec.upper, spec.base)
    power = spec.sign_power
    sign = (-1) ** power
    absz = float(abs(z))
    term = mpc(1)
    total = mpc(1)
    qn = mpc(1)
    n = 0
    while True:
        if stop is not None and n >= stop:
            return total
        ratio = z
        for u in upper:
            ratio *= 1 - u * qn
        ratio /= 1 - qn * q
        for v in lower:
            ratio /= 1 - v * qn
        if power:
            ratio *= sign * qn**power
        term *= ratio
        total += term
        n += 1
        qn *= q
        if stop is None:
            rho = _majorant_ratio(spec, absz, n)
            if rho < 1 and float(abs(term)) * rho / (1 - rho) <= eps * max(1.0, float(abs(total))):
                return total
        if n > MAX_TERMS:
            raise SeriesDivergenceError(f"no convergence after {MAX_TERMS} terms")


def _lhs(ctx: _Context, z: mpc) -> mpc:
    params = ctx.params
    total = mpc(0)
    for i in range(params.r):
        spec1, spec2 = lhs_series_specs(params, i)
        (u1, l1), (u2, l2) = ctx.series_parameters(i)
        v1 = _sum(spec1, u1, l1, ctx.argument_factor(i) * z, ctx.q)
        v2 = _sum(spec2, u2, l2, z, ctx.q)
        total += ctx.prefactor(i) * z ** (-params.n[i]) * v1 * v2
    return total


def lhs_eval_mp(params: HypergeometricParams, z, dps: int = 50) -> mpc:
    """Left-hand side at ``z`` (a complex or an ``mpc``) with ``dps`` digits."""
    with working_precision(dps):
        return _lhs(_Context(params), to_mpc(z))


def scaled_lhs_mp(params: HypergeometricParams, points, dps: int = 50) -> list[mpc]:
    """``z^n_max * denominator(z) * lhs(z)``, a polynomial in ``z``, at each
    of ``points``."""
    with working_precision(dps):
        ctx = _Context(params)
        out = []
        for z in points:
            z = to_mpc(z)
            den = _poch(ctx.W * z, ctx.q, params.w_factor_length) * _poch(z, ctx.q, params.t_plus)
            out.append(z**params.n_max * den * _lhs(ctx, z))
        return out


def beta_coefficients_mp(params: HypergeometricParams, dps: int = 50) -> dict[int, mpc]:
    """``beta_k = sum_j (-1)^(k-j) D_(k-j) alpha_j`` over ``params.k_range``,
    with every ingredient computed at ``dps`` digits."""
    k_lo, k_hi = params.k_range
    with working_precision(dps):
        ctx = _Context(params)
        d = ctx.d_coefficients()
        top = len(d) - 1
        alphas = {j: ctx.alpha(j) for j in range(k_lo, k_hi + 1)}
        return {
            k: sum(
                ((-1) ** (k - j) * d[k - j] * alphas[j] for j in range(max(k_lo, k - top), k + 1)),
                mpc(0),
            )
            for k in range(k_lo, k_hi + 1)
        }


def beta_total_mp(params: HypergeometricParams, dps: int = 50) -> complex:
    """``sum_k beta_k``, added up before rounding to double."""
    coeffs = beta_coefficients_mp(params, dps)
    with working_precision(dps):
        return complex(sum(coeffs.values(), mpc(0)))
