"""Precision context, elementary functions, deterministic summation and a
tanh-sinh (double-exponential) quadrature engine.

All arithmetic is done with gmpy2/MPFR. Every public operation receives a
PrecisionContext and returns values rounded to ctx.bits; intermediate
arithmetic runs at a higher guard precision. Given identical inputs and
context, results are bit-identical (MPFR rounds correctly and node tables
are built deterministically), including across threads.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError, InvalidDomain, NonConvergence, NonFinite

# RealValue is a semantic role, not a wrapper type; mpfr plays it everywhere.
RealValue = mpfr

# Guard bits for elementary-function calls rounded back to ctx.bits.
GUARD_BITS = 32


def _round_to(x, bits: int) -> mpfr:
    return gmpy2.mpfr(x, bits)


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision plus quadrature / iteration tolerances.

    quad_tol defaults to 2**(10 - bits). All operations threaded through the
    same context with the same inputs produce bit-identical results.
    """

    bits: int
    quad_tol: Optional[RealValue] = None
    max_quad_level: int = 12
    max_iters: int = 64

    def __post_init__(self):
        if not isinstance(self.bits, int) or self.bits < 64:
            raise DomainError("bits must be an integer >= 64")
        if self.max_quad_level < 1:
            raise DomainError("max_quad_level must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be positive")
        if self.quad_tol is None:
            with gmpy2.context(precision=64):
                object.__setattr__(self, "quad_tol", mpfr(2) ** (10 - self.bits))
        else:
            with gmpy2.context(precision=64):
                qt = mpfr(self.quad_tol)
            if not (0 < qt < 1):
                raise DomainError("quad_tol must lie in (0, 1)")
            object.__setattr__(self, "quad_tol", qt)

    def with_quad_tol(self, quad_tol) -> "PrecisionContext":
        return PrecisionContext(self.bits, quad_tol,
                                self.max_quad_level, self.max_iters)


@dataclass(frozen=True)
class QuadResult:
    value: RealValue
    err_estimate: RealValue
    levels_used: int
    evaluations: int

    def __post_init__(self):
        if self.err_estimate < 0:
            raise ValueError("err_estimate must be >= 0")


def quad_precision(ctx: PrecisionContext) -> int:
    """Internal working precision of the quadrature engine.

    2*bits + 64: the node tail reaches z ~ 2**(-P), so an integrand with an
    algebraic endpoint factor (1-t)**(-1/p) is truncated with bias
    ~ 2**(-P*(1-1/p)), which stays below quad_tol for p >= 2, and the
    summation rounding noise (#nodes * 2**(-P)) is negligible.
    """
    return 2 * ctx.bits + 64


# ---------------------------------------------------------------------------
# tanh-sinh node tables, cached per (precision, level), built lazily.
# ---------------------------------------------------------------------------

_node_cache: dict = {}
_node_lock = threading.Lock()


def _t_max(prec: int) -> mpfr:
    # Smallest t with 1 - tanh((pi/2)*sinh(t)) < 2**-(prec+2): beyond it the
    # abscissa is indistinguishable from the endpoint at this precision.
    with gmpy2.context(precision=96):
        return gmpy2.asinh((prec + 2) * gmpy2.log(2) / gmpy2.const_pi())


def _build_level(prec: int, level: int) -> tuple:
    tmax = _t_max(prec)
    with gmpy2.context(precision=prec):
        half_pi = gmpy2.const_pi() / 2
        h = mpfr(2) ** (-level)
        jmax = int(gmpy2.floor(mpfr(tmax) / h))
        js = range(0, jmax + 1) if level == 0 else range(1, jmax + 1, 2)
        out = []
        for j in js:
            t = j * h
            u = half_pi * gmpy2.sinh(t)
            # z = 1 - tanh(u), kept as a distance from the endpoint so the
            # abscissa can be formed without cancellation.
            z = 2 / (gmpy2.exp(2 * u) + 1)
            w = half_pi * gmpy2.cosh(t) * z * (2 - z)
            out.append((z, w))
    return tuple(out)


def _nodes(prec: int, level: int) -> tuple:
    key = (prec, level)
    table = _node_cache.get(key)
    if table is None:
        with _node_lock:
            table = _node_cache.get(key)
            if table is None:
                table = _build_level(prec, level)
                _node_cache[key] = table
    return table


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def integrate(f: Callable, lo, hi, ctx: PrecisionContext) -> QuadResult:
    """Tanh-sinh quadrature of f over [lo, hi] with level doubling.

    Stops when the inter-level difference |V_L - V_(L-1)| falls below
    ctx.quad_tol; raises NonConvergence at the level cap. Integrable
    algebraic endpoint singularities are absorbed by the double-exponential
    transform; nodes whose abscissa rounds onto an endpoint are skipped
    (f is only required to be finite on the open interval). A non-finite
    f value at an interior node raises NonFinite.
    """
    prec = quad_precision(ctx)
    with gmpy2.context(precision=prec):
        lo_g = mpfr(lo)
        hi_g = mpfr(hi)
        if not lo_g < hi_g:
            raise InvalidDomain(f"need lo < hi, got [{lo_g}, {hi_g}]")
        c = (lo_g + hi_g) / 2
        d = (hi_g - lo_g) / 2
        tol = mpfr(ctx.quad_tol)
        total = mpfr(0)
        prev = None
        err = None
        evals = 0
        for level in range(ctx.max_quad_level + 1):
            part = mpfr(0)
            for z, w in _nodes(prec, level):
                if z == 1:  # center node, level 0 only
                    fc = f(c)
                    evals += 1
                    if not gmpy2.is_finite(fc):
                        raise NonFinite(f"integrand non-finite at {c}")
                    part += w * fc
                    continue
                dz = d * z
                x_hi = hi_g - dz
                x_lo = lo_g + dz
                if x_hi >= hi_g or x_lo <= lo_g:
                    continue  # node rounded onto an endpoint
                f_hi = f(x_hi)
                f_lo = f(x_lo)
                evals += 2
                if not (gmpy2.is_finite(f_hi) and gmpy2.is_finite(f_lo)):
                    x_bad = x_hi if not gmpy2.is_finite(f_hi) else x_lo
                    raise NonFinite(f"integrand non-finite at {x_bad}")
                part += w * (f_hi + f_lo)
            total += part
            value = d * total / (1 << level)
            if prev is not None:
                err = abs(value - prev)
                if err < tol:
                    return QuadResult(
                        value=_round_to(value, ctx.bits),
                        err_estimate=_round_to(err, 64),
                        levels_used=level,
                        evaluations=evals,
                    )
            prev = value
        raise NonConvergence(
            f"tanh-sinh did not reach tol {tol} within "
            f"{ctx.max_quad_level} levels (err ~ {err})",
            value=_round_to(prev, ctx.bits),
            err_estimate=None if err is None else _round_to(err, 64),
        )


# ---------------------------------------------------------------------------
# elementary-function suite (huge-precision wrappers rounded to ctx.bits)
# ---------------------------------------------------------------------------

def exp(x, ctx: PrecisionContext) -> RealValue:
    """e**x to within a small number of ulps at ctx.bits."""
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        r = gmpy2.exp(mpfr(x))
    return _round_to(r, ctx.bits)


def log(x, ctx: PrecisionContext) -> RealValue:
    """Natural logarithm; requires x > 0."""
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        xg = mpfr(x)
        if not xg > 0:
            raise DomainError(f"log requires x > 0, got {xg}")
        r = gmpy2.log(xg)
    return _round_to(r, ctx.bits)


def sin(x, ctx: PrecisionContext) -> RealValue:
    """Circular sine."""
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        r = gmpy2.sin(mpfr(x))
    return _round_to(r, ctx.bits)


def pow(x, y, ctx: PrecisionContext) -> RealValue:
    """x**y; requires x > 0 unless y is an integer."""
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        xg = mpfr(x)
        yg = mpfr(y)
        if xg <= 0 and not gmpy2.is_integer(yg):
            raise DomainError(
                f"pow requires x > 0 for non-integer exponent, got x={xg}")
        if xg == 0 and yg < 0:
            raise DomainError("pow(0, y) undefined for y < 0")
        r = xg ** yg
    return _round_to(r, ctx.bits)


def nth_root(x, n: int, ctx: PrecisionContext) -> RealValue:
    """x**(1/n) for x >= 0 and positive integer n."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"nth_root requires a positive integer n, got {n}")
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        xg = mpfr(x)
        if xg < 0:
            raise DomainError(f"nth_root requires x >= 0, got {xg}")
        r = gmpy2.rootn(xg, n)
    return _round_to(r, ctx.bits)


def pi(ctx: PrecisionContext) -> RealValue:
    """The constant pi."""
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        r = gmpy2.const_pi()
    return _round_to(r, ctx.bits)


# ---------------------------------------------------------------------------
# deterministic summation
# ---------------------------------------------------------------------------

def sum_ordered(terms: Iterable, ctx: Optional[PrecisionContext] = None,
                *, precision: Optional[int] = None) -> RealValue:
    """Compensated (Neumaier) summation in the given, fixed order.

    With a context, arithmetic runs at ctx.bits + 32 and the result is
    rounded to ctx.bits; with an explicit precision the unrounded guard
    value is returned. Deterministic for a fixed precision.
    """
    if precision is None:
        precision = (ctx.bits + GUARD_BITS) if ctx is not None else 128
    with gmpy2.context(precision=precision):
        s = mpfr(0)
        comp = mpfr(0)
        for term in terms:
            t = mpfr(term)
            tmp = s + t
            if abs(s) >= abs(t):
                comp += (s - tmp) + t
            else:
                comp += (t - tmp) + s
            s = tmp
        result = s + comp
    if ctx is not None:
        return _round_to(result, ctx.bits)
    return result
