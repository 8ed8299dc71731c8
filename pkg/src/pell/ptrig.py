"""Generalized trigonometric functions sin_p, cos_p, arcsin_p and the
half-period pi_p.

arcsin_p(x) = integral of (1 - t**p)**(-1/p) over [0, x]; sin_p is its
inverse on [0, pi_p/2]; cos_p = (1 - sin_p**p)**(1/p). The domain is the
first quarter-period only."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import DomainError, NonConvergence
from .mpnum import (
    GUARD_BITS,
    PrecisionContext,
    RealValue,
    _round_to,
    integrate,
    quad_precision,
)


@dataclass(frozen=True)
class PExponent:
    """Exponent of the generalized trigonometric system; requires p > 1."""

    p: RealValue

    def __post_init__(self):
        object.__setattr__(self, "p", _exact_mpfr(self.p))
        if not self.p > 1:
            raise DomainError(f"PExponent requires p > 1, got {self.p}")


def _exact_mpfr(x) -> mpfr:
    """Convert a number to mpfr without changing its value."""
    if isinstance(x, mpfr):
        return x
    if isinstance(x, int):
        return gmpy2.mpfr(x, max(64, x.bit_length() + 1))
    if isinstance(x, float):
        return gmpy2.mpfr(x, 64)
    raise DomainError(f"cannot interpret {x!r} as an exponent")


PLike = Union[PExponent, int, float, mpfr]


def as_pexponent(p: PLike) -> PExponent:
    return p if isinstance(p, PExponent) else PExponent(p)


# ---------------------------------------------------------------------------
# power plans: the integrands only ever need t**p, x**(1/p), x**(-1/p) and
# x**(1/p - 1). When p is a small exact rational num/den these reduce to
# integer powers plus one rootn, far cheaper at high precision than a
# general exp/log-based pow.
# ---------------------------------------------------------------------------

class _PowerPlan:
    __slots__ = ("tp", "pow_1p", "pow_m1p", "pow_1p_m1")

    def __init__(self, tp, pow_1p, pow_m1p, pow_1p_m1):
        self.tp = tp
        self.pow_1p = pow_1p
        self.pow_m1p = pow_m1p
        self.pow_1p_m1 = pow_1p_m1


def _pow_plan(p: mpfr, prec: int) -> _PowerPlan:
    q = mpq(p)  # exact: mpfr values are dyadic rationals
    num = int(q.numerator)
    den = int(q.denominator)
    if 0 < num <= 64 and den <= 8:
        rootn = gmpy2.rootn
        if den == 1 and num == 2:
            tp = lambda t: t * t
        elif den == 1:
            tp = lambda t: t ** num
        else:
            tp = lambda t: rootn(t ** num, den)
        pow_1p = (lambda x: rootn(x, num)) if den == 1 else \
            (lambda x: rootn(x ** den, num))
        pow_m1p = (lambda x: 1 / rootn(x, num)) if den == 1 else \
            (lambda x: 1 / rootn(x ** den, num))
        diff = num - den  # positive since p > 1
        pow_1p_m1 = lambda x: 1 / rootn(x ** diff, num)
        return _PowerPlan(tp, pow_1p, pow_m1p, pow_1p_m1)
    with gmpy2.context(precision=prec):
        e = mpfr(p)
        inv = 1 / e
        minv = -inv
        em1 = inv - 1
    return _PowerPlan(
        lambda t: t ** e,
        lambda x: x ** inv,
        lambda x: x ** minv,
        lambda x: x ** em1,
    )


def _pi_p_raw(p: mpfr, prec: int) -> mpfr:
    """Closed form 2*pi / (p * sin(pi/p)) at the requested precision."""
    with gmpy2.context(precision=prec):
        pg = mpfr(p)
        pi_c = gmpy2.const_pi()
        return 2 * pi_c / (pg * gmpy2.sin(pi_c / pg))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def pi_p(p: PLike, ctx: PrecisionContext) -> RealValue:
    """Generalized half-period pi_p = 2*arcsin_p(1) = 2*pi/(p*sin(pi/p)),
    evaluated by the closed form."""
    pe = as_pexponent(p)
    return _round_to(_pi_p_raw(pe.p, ctx.bits + GUARD_BITS), ctx.bits)


def arcsin_p(x, p: PLike, ctx: PrecisionContext) -> RealValue:
    """arcsin_p(x) for x in [0, 1], by tanh-sinh quadrature of the defining
    integral; the (1-t)**(-1/p) endpoint singularity at x = 1 is absorbed
    by the double-exponential nodes."""
    pe = as_pexponent(p)
    prec = quad_precision(ctx)
    with gmpy2.context(precision=prec):
        xg = mpfr(x)
    if not 0 <= xg <= 1:
        raise DomainError(f"arcsin_p requires 0 <= x <= 1, got {xg}")
    if xg == 0:
        return _round_to(0, ctx.bits)
    plan = _pow_plan(pe.p, prec)
    f = lambda t: plan.pow_m1p(1 - plan.tp(t))
    return integrate(f, 0, xg, ctx).value


def sin_p(theta, p: PLike, ctx: PrecisionContext) -> RealValue:
    """Inverse of arcsin_p on [0, pi_p/2], by bisection-bracketed Newton
    iteration on g(s) = arcsin_p(s) - theta with g'(s) = (1-s**p)**(-1/p).

    arcsin_p is evaluated once in full, then updated by integrating over
    the Newton increments; a fresh full evaluation at the accepted root
    certifies |g| < 2**(8-bits) * pi_p. Inputs within one working ulp of
    an endpoint are clamped onto it.
    """
    pe = as_pexponent(p)
    bits = ctx.bits
    guard = bits + GUARD_BITS
    prec = quad_precision(ctx)
    with gmpy2.context(precision=guard):
        pg = mpfr(pe.p)
        pi_half = _pi_p_raw(pe.p, guard) / 2
        theta_g = mpfr(theta)
        edge = mpfr(2) ** (4 - bits) * pi_half
        if theta_g < -edge or theta_g > pi_half + edge:
            raise DomainError(
                f"sin_p requires 0 <= theta <= pi_p/2, got {theta_g}")
        if theta_g <= 0:
            return _round_to(0, bits)
        if theta_g >= pi_half - edge:
            return _round_to(1, bits)

    # Tight internal quadrature tolerance so the accumulated arcsin value
    # supports the promised |g| bound.
    with gmpy2.context(precision=64):
        tight = mpfr(2) ** (-bits - 8)
    ictx = ctx.with_quad_tol(tight)
    plan = _pow_plan(pe.p, prec)
    arc = lambda a, b: integrate(
        lambda t: plan.pow_m1p(1 - plan.tp(t)), a, b, ictx).value

    with gmpy2.context(precision=guard):
        target = mpfr(2) ** (7 - bits) * pi_half
        # starting guess: the p=2 shape, or the asymptotic inverse when the
        # derivative singularity at s=1 is close
        if theta_g > pi_half * (1 - mpfr(1) / 256):
            tail = pi_half - theta_g
            s = 1 - ((1 - 1 / pg) * pg ** (1 / pg) * tail) ** (pg / (pg - 1))
        else:
            s = gmpy2.sin(theta_g * gmpy2.const_pi() / (2 * pi_half))
        eps = mpfr(2) ** (-bits)
        s = min(max(s, eps), 1 - eps)
        lo_b, hi_b = mpfr(0), mpfr(1)  # g(lo_b) <= 0 <= g(hi_b)
        acc = mpfr(arc(0, s))
        certified = False
        for _ in range(ctx.max_iters):
            g = acc - theta_g
            if abs(g) < target:
                fresh = mpfr(arc(0, s))
                g = fresh - theta_g
                if abs(g) < 2 * target:
                    certified = True
                    break
                acc = fresh
            if g > 0:
                hi_b = min(hi_b, s)
            else:
                lo_b = max(lo_b, s)
            step = -g * plan.pow_1p(1 - plan.tp(s))
            s_new = s + step
            if not lo_b < s_new < hi_b:
                s_new = (lo_b + hi_b) / 2
            if s_new == s:
                continue
            a, b = (s, s_new) if s_new > s else (s_new, s)
            inc = mpfr(arc(a, b))
            acc = acc + inc if s_new > s else acc - inc
            s = s_new
        if not certified:
            raise NonConvergence(
                f"sin_p Newton iteration did not certify within "
                f"{ctx.max_iters} steps (p={pg}, theta={theta_g})")
        return _round_to(s, bits)


def cos_p(theta, p: PLike, ctx: PrecisionContext) -> RealValue:
    """cos_p(theta) = (1 - sin_p(theta)**p)**(1/p) on [0, pi_p/2]."""
    pe = as_pexponent(p)
    s = sin_p(theta, pe, ctx)
    prec = quad_precision(ctx)
    plan = _pow_plan(pe.p, prec)
    with gmpy2.context(precision=prec):
        c = plan.pow_1p(1 - plan.tp(mpfr(s)))
    return _round_to(c, ctx.bits)
