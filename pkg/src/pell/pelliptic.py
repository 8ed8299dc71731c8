"""Complete p-elliptic integrals of the first and second kind, the
two-parameter integrals I_p and J_p, their derivative and second-order ODE
identities, the generalized Legendre relation, the Gauss hypergeometric
series representation, and the four quartic modulus transformations.

All theta-integrals are evaluated in the substituted variable t = sin_p
theta, so no sin_p evaluations happen inside quadrature and the only
singular behavior is the known endpoint factor (1 - t**p)**(-1/p)."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Tuple

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError, NonConvergence
from .mpnum import (
    GUARD_BITS,
    PrecisionContext,
    RealValue,
    _round_to,
    integrate,
    quad_precision,
)
from .ptrig import PExponent, PLike, _pi_p_raw, _pow_plan, as_pexponent

HYP2F1_TERM_CAP = 10 ** 6

# Residual tolerance scale factors for the finite-difference checks, frozen
# from a calibration run of the p=2 case at 256 bits (worst observed
# |residual| / h**2 over the interior k grid, times a 64x safety margin).
ODE_RESIDUAL_C = 1 << 16
FD_DERIVATIVE_C = 1 << 16


@dataclass(frozen=True)
class Modulus:
    """A pair (p, k) with the derived complement k' = (1 - k**p)**(1/p).

    k = 1 is representable (k_comp = 0) so the second-kind integral can be
    evaluated there; the first-kind integral rejects it.
    """

    p: PExponent
    k: RealValue
    k_comp: RealValue


def modulus(p: PLike, k, ctx: PrecisionContext) -> Modulus:
    """Build a Modulus, deriving the complement at guard precision."""
    pe = as_pexponent(p)
    if isinstance(k, mpfr):
        kg = k
    else:
        with gmpy2.context(precision=ctx.bits + GUARD_BITS):
            kg = mpfr(k)
    if not 0 <= kg <= 1:
        raise DomainError(f"modulus requires 0 <= k <= 1, got {kg}")
    plan = _pow_plan(pe.p, ctx.bits + GUARD_BITS)
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        kc = plan.pow_1p(1 - plan.tp(kg)) if kg > 0 else mpfr(1)
    return Modulus(pe, kg, _round_to(kc, ctx.bits))


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of numerically checking one identity."""

    identity_id: str
    inputs: Tuple[Tuple[str, RealValue], ...]
    lhs: RealValue
    rhs: RealValue
    abs_defect: RealValue
    rel_defect: RealValue
    tol: RealValue
    passed: bool


def make_report(identity_id: str, inputs, lhs, rhs, tol,
                prec: int = 128) -> IdentityReport:
    with gmpy2.context(precision=prec):
        lhs_g = mpfr(lhs)
        rhs_g = mpfr(rhs)
        abs_d = abs(lhs_g - rhs_g)
        scale = max(abs(lhs_g), abs(rhs_g))
        rel_d = abs_d / scale if scale > 0 else abs_d
        tol_g = mpfr(tol)
    return IdentityReport(
        identity_id=identity_id,
        inputs=tuple(inputs),
        lhs=lhs_g,
        rhs=rhs_g,
        abs_defect=_round_to(abs_d, 64),
        rel_defect=_round_to(rel_d, 64),
        tol=_round_to(tol_g, 64),
        passed=bool(abs_d <= tol_g),
    )


# ---------------------------------------------------------------------------
# memoized quadrature of the four integral families. Cached values are
# bit-identical to recomputation, so determinism is unaffected.
# ---------------------------------------------------------------------------

_cache: dict = {}
_cache_lock = threading.Lock()


def _ctx_key(ctx: PrecisionContext) -> tuple:
    return (ctx.bits, ctx.max_quad_level, gmpy2.to_binary(ctx.quad_tol))


def _cached(key, compute):
    hit = _cache.get(key)
    if hit is not None:
        return hit
    value = compute()
    with _cache_lock:
        return _cache.setdefault(key, value)


def K_p(m: Modulus, ctx: PrecisionContext) -> RealValue:
    """First-kind integral: (1 - k**p t**p)**(1/p-1) (1-t**p)**(-1/p) dt
    over [0, 1]. Diverges at k = 1, which is rejected."""
    if not 0 <= m.k < 1:
        raise DomainError(f"K_p requires 0 <= k < 1, got {m.k}")
    key = ("K", _ctx_key(ctx), gmpy2.to_binary(m.p.p), gmpy2.to_binary(m.k))

    def compute():
        prec = quad_precision(ctx)
        plan = _pow_plan(m.p.p, prec)
        with gmpy2.context(precision=prec):
            kp = plan.tp(mpfr(m.k))

        def f(t):
            tp = plan.tp(t)
            return plan.pow_1p_m1(1 - kp * tp) * plan.pow_m1p(1 - tp)

        return integrate(f, 0, 1, ctx).value

    return _cached(key, compute)


def E_p(m: Modulus, ctx: PrecisionContext) -> RealValue:
    """Second-kind integral: (1 - k**p t**p)**(1/p) (1-t**p)**(-1/p) dt
    over [0, 1]; finite on all of 0 <= k <= 1."""
    key = ("E", _ctx_key(ctx), gmpy2.to_binary(m.p.p), gmpy2.to_binary(m.k))

    def compute():
        prec = quad_precision(ctx)
        plan = _pow_plan(m.p.p, prec)
        with gmpy2.context(precision=prec):
            kp = plan.tp(mpfr(m.k))

        def f(t):
            tp = plan.tp(t)
            return plan.pow_1p(1 - kp * tp) * plan.pow_m1p(1 - tp)

        return integrate(f, 0, 1, ctx).value

    return _cached(key, compute)


def I_p(a, b, p: PLike, ctx: PrecisionContext) -> RealValue:
    """Two-parameter first-kind integral
    (a**p (1-t**p) + b**p t**p)**(1/p-1) (1-t**p)**(-1/p) dt over [0, 1];
    K_p(k) = I_p(1, k')."""
    return _ij_integral("I", a, b, p, ctx)


def J_p(a, b, p: PLike, ctx: PrecisionContext) -> RealValue:
    """Two-parameter second-kind integral with outer exponent +1/p;
    E_p(k) = J_p(1, k')."""
    return _ij_integral("J", a, b, p, ctx)


def _ij_integral(kind, a, b, p, ctx):
    pe = as_pexponent(p)
    prec = quad_precision(ctx)
    with gmpy2.context(precision=prec):
        ag = mpfr(a)
        bg = mpfr(b)
    if not (ag > 0 and bg > 0):
        raise DomainError(f"{kind}_p requires a > 0 and b > 0")
    key = (kind, _ctx_key(ctx), gmpy2.to_binary(pe.p),
           gmpy2.to_binary(ag), gmpy2.to_binary(bg))

    def compute():
        plan = _pow_plan(pe.p, prec)
        with gmpy2.context(precision=prec):
            ap = plan.tp(ag)
            bp = plan.tp(bg)
            slope = bp - ap
        outer = plan.pow_1p_m1 if kind == "I" else plan.pow_1p

        def f(t):
            tp = plan.tp(t)
            return outer(ap + slope * tp) * plan.pow_m1p(1 - tp)

        return integrate(f, 0, 1, ctx).value

    return _cached(key, compute)


# ---------------------------------------------------------------------------
# derivative closed forms and ODE residuals
# ---------------------------------------------------------------------------

def dE_dk(m: Modulus, ctx: PrecisionContext) -> RealValue:
    """dE_p/dk = (E_p - K_p)/k; requires 0 < k < 1."""
    _require_interior(m)
    K = K_p(m, ctx)
    E = E_p(m, ctx)
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        r = (mpfr(E) - mpfr(K)) / mpfr(m.k)
    return _round_to(r, ctx.bits)


def dK_dk(m: Modulus, ctx: PrecisionContext) -> RealValue:
    """dK_p/dk = (E_p - (k')**p K_p) / (k (k')**p); requires 0 < k < 1."""
    _require_interior(m)
    K = K_p(m, ctx)
    E = E_p(m, ctx)
    plan = _pow_plan(m.p.p, ctx.bits + GUARD_BITS)
    with gmpy2.context(precision=ctx.bits + GUARD_BITS):
        kcp = 1 - plan.tp(mpfr(m.k))  # (k')**p, formed without the root
        r = (mpfr(E) - kcp * mpfr(K)) / (mpfr(m.k) * kcp)
    return _round_to(r, ctx.bits)


def _require_interior(m: Modulus):
    if not 0 < m.k < 1:
        raise DomainError(f"derivative formulas need 0 < k < 1, got k={m.k}")


def _complement_at(pe: PExponent, k, prec: int) -> mpfr:
    plan = _pow_plan(pe.p, prec)
    with gmpy2.context(precision=prec):
        return plan.pow_1p(1 - plan.tp(mpfr(k)))


def _y_and_yprime(which: str, pe: PExponent, k, ctx, prec: int):
    """Value and analytic first derivative of the selected solution at k.

    The primed solutions go through the complement: with
    dk'/dk = -k**(p-1) (k')**(1-p),
      d(K_p')/dk = -(E_p(k') - k**p K_p(k')) / (k (k')**p)
      d(E_p'-K_p')/dk = E_p(k')/k.
    """
    m = modulus(pe, k, ctx)
    plan = _pow_plan(pe.p, prec)
    with gmpy2.context(precision=prec):
        kg = mpfr(k)
        kp = plan.tp(kg)
        kcp = 1 - kp  # (k')**p
    if which == "K":
        y = K_p(m, ctx)
        with gmpy2.context(precision=prec):
            yp = (mpfr(E_p(m, ctx)) - kcp * mpfr(y)) / (kg * kcp)
        return y, yp
    if which == "E":
        y = E_p(m, ctx)
        with gmpy2.context(precision=prec):
            yp = (mpfr(y) - mpfr(K_p(m, ctx))) / kg
        return y, yp
    kc = _complement_at(pe, k, prec)
    mc = modulus(pe, kc, ctx)
    Kc = K_p(mc, ctx)
    Ec = E_p(mc, ctx)
    if which == "Kprime":
        with gmpy2.context(precision=prec):
            yp = -(mpfr(Ec) - kp * mpfr(Kc)) / (kg * kcp)
        return Kc, yp
    if which == "EprimeMinusKprime":
        with gmpy2.context(precision=prec):
            y = mpfr(Ec) - mpfr(Kc)
            yp = mpfr(Ec) / kg
        return y, yp
    raise DomainError(f"unknown ODE solution selector {which!r}")


ODE_SOLUTIONS = ("K", "Kprime", "E", "EprimeMinusKprime")


def ode_residual(which: str, m: Modulus, ctx: PrecisionContext) -> IdentityReport:
    """Residual of the second-order modulus ODE satisfied by the selected
    solution, with y'' by central finite difference of the analytic first
    derivative (step h = 2**(-bits//3)) and tolerance C*h**2.

    K and K' satisfy k(1-k**p) y'' + (1-(p+1)k**p) y' - (p-1)k**(p-1) y = 0;
    E and E'-K' satisfy k(1-k**p) y'' + (1-k**p) y' + k**(p-1) y = 0.
    """
    if which not in ODE_SOLUTIONS:
        raise DomainError(f"which must be one of {ODE_SOLUTIONS}")
    bits = ctx.bits
    pe = m.p
    with gmpy2.context(precision=bits + GUARD_BITS):
        boundary = mpfr(2) ** (-(bits // 4))
        kg = mpfr(m.k)
        if not boundary <= kg <= 1 - boundary:
            raise DomainError(
                f"ode_residual needs k in [2^-(bits/4), 1-2^-(bits/4)], got {kg}")
    hbits = bits // 3
    fd_prec = bits + hbits + 64
    with gmpy2.context(precision=fd_prec):
        h = mpfr(2) ** (-hbits)
        k_hi = mpfr(m.k) + h
        k_lo = mpfr(m.k) - h
    y0, yp0 = _y_and_yprime(which, pe, m.k, ctx, fd_prec)
    _, yp_hi = _y_and_yprime(which, pe, k_hi, ctx, fd_prec)
    _, yp_lo = _y_and_yprime(which, pe, k_lo, ctx, fd_prec)
    plan = _pow_plan(pe.p, fd_prec)
    with gmpy2.context(precision=fd_prec):
        ypp = (yp_hi - yp_lo) / (2 * h)
        kg = mpfr(m.k)
        kp = plan.tp(kg)
        kpm1 = kp / kg  # k**(p-1)
        if which in ("K", "Kprime"):
            pg = mpfr(pe.p)
            residual = (kg * (1 - kp) * ypp + (1 - (pg + 1) * kp) * yp0
                        - (pg - 1) * kpm1 * mpfr(y0))
        else:
            residual = kg * (1 - kp) * ypp + (1 - kp) * yp0 + kpm1 * mpfr(y0)
        tol = ODE_RESIDUAL_C * h * h
    return make_report(
        f"ode-{which}", (("p", pe.p), ("k", m.k)), residual, 0, tol)


DERIVATIVE_TARGETS = ("K", "E")


def derivative_check(which: str, m: Modulus, ctx: PrecisionContext) -> IdentityReport:
    """Cross-check a derivative closed form against a central finite
    difference of the integral itself, step h = 2**(-bits//3), tolerance
    C1*h**2. Same interior-k precondition as ode_residual."""
    if which not in DERIVATIVE_TARGETS:
        raise DomainError(f"which must be one of {DERIVATIVE_TARGETS}")
    bits = ctx.bits
    with gmpy2.context(precision=bits + GUARD_BITS):
        boundary = mpfr(2) ** (-(bits // 4))
        if not boundary <= mpfr(m.k) <= 1 - boundary:
            raise DomainError(
                f"derivative_check needs k in [2^-(bits/4), 1-2^-(bits/4)]")
    hbits = bits // 3
    fd_prec = bits + hbits + 64
    with gmpy2.context(precision=fd_prec):
        h = mpfr(2) ** (-hbits)
        k_hi = mpfr(m.k) + h
        k_lo = mpfr(m.k) - h
    func = K_p if which == "K" else E_p
    closed = dK_dk(m, ctx) if which == "K" else dE_dk(m, ctx)
    f_hi = func(modulus(m.p, k_hi, ctx), ctx)
    f_lo = func(modulus(m.p, k_lo, ctx), ctx)
    with gmpy2.context(precision=fd_prec):
        fd = (mpfr(f_hi) - mpfr(f_lo)) / (2 * h)
        tol = FD_DERIVATIVE_C * h * h
    return make_report(
        f"derivative-{which}", (("p", m.p.p), ("k", m.k)),
        fd, closed, tol, prec=fd_prec)


def legendre_defect(p: PLike, k, ctx: PrecisionContext) -> IdentityReport:
    """Defect of K_p' E_p + K_p E_p' - K_p K_p' = pi_p / 2."""
    pe = as_pexponent(p)
    m = modulus(pe, k, ctx)
    if not 0 < m.k < 1:
        raise DomainError(f"legendre_defect requires 0 < k < 1, got {m.k}")
    mc = modulus(pe, m.k_comp, ctx)
    K = K_p(m, ctx)
    E = E_p(m, ctx)
    Kc = K_p(mc, ctx)
    Ec = E_p(mc, ctx)
    guard = ctx.bits + GUARD_BITS
    with gmpy2.context(precision=guard):
        lhs = mpfr(Kc) * mpfr(E) + mpfr(K) * mpfr(Ec) - mpfr(K) * mpfr(Kc)
        rhs = _pi_p_raw(pe.p, guard) / 2
        tol = 8 * mpfr(ctx.quad_tol)
    return make_report(
        "legendre", (("p", pe.p), ("k", m.k)), lhs, rhs, tol, prec=guard)


# ---------------------------------------------------------------------------
# hypergeometric series and the identities expressed with it
# ---------------------------------------------------------------------------

def hyp2f1(a, b, c, x, ctx: PrecisionContext) -> RealValue:
    """Partial sum of the Gauss series sum (a)_n (b)_n / ((c)_n n!) x**n,
    truncated when a term falls below 2**(-bits-8).

    Plain series convergence restricts the argument to 0 <= x < 1; the fast
    documented domain is x <= 3/4. c must not be a non-positive integer.
    """
    guard = ctx.bits + GUARD_BITS
    with gmpy2.context(precision=guard):
        ag = mpfr(a)
        bg = mpfr(b)
        cg = mpfr(c)
        xg = mpfr(x)
        if cg <= 0 and gmpy2.is_integer(cg):
            raise DomainError(f"c must not be a non-positive integer, got {cg}")
        if not 0 <= xg < 1:
            raise DomainError(f"series argument must satisfy 0 <= x < 1, got {xg}")
        thresh = mpfr(2) ** (-ctx.bits - 8)
        term = mpfr(1)
        total = mpfr(1)
        for n in range(HYP2F1_TERM_CAP):
            term = term * (ag + n) * (bg + n) * xg / ((cg + n) * (n + 1))
            total += term
            if abs(term) < thresh:
                return _round_to(total, ctx.bits)
    raise NonConvergence(
        f"hypergeometric series needed more than {HYP2F1_TERM_CAP} terms",
        value=_round_to(total, ctx.bits))


def ramanujan_defect(x, ctx: PrecisionContext) -> IdentityReport:
    """Defect of F(1/4,3/4;1;1-((1-x)/(1+3x))**2) = sqrt(1+3x) F(1/4,3/4;1;x**2)
    for 0 <= x <= 1/2."""
    guard = ctx.bits + GUARD_BITS
    with gmpy2.context(precision=guard):
        xg = mpfr(x)
        if not 0 <= xg <= mpfr("0.5"):
            raise DomainError(f"requires 0 <= x <= 1/2, got {xg}")
        ratio = (1 - xg) / (1 + 3 * xg)
        arg1 = 1 - ratio * ratio
        x_sq = xg * xg
        quarter = mpfr(1) / 4
        three_q = 3 * quarter
    lhs = hyp2f1(quarter, three_q, 1, arg1, ctx)
    rhs_f = hyp2f1(quarter, three_q, 1, x_sq, ctx)
    with gmpy2.context(precision=guard):
        rhs = gmpy2.sqrt(1 + 3 * xg) * mpfr(rhs_f)
        tol = mpfr(2) ** (8 - ctx.bits)
    return make_report("ramanujan", (("x", xg),), lhs, rhs, tol, prec=guard)


# ---------------------------------------------------------------------------
# quartic modulus transformations
# ---------------------------------------------------------------------------

LANDEN_ITEMS = ("i", "ii", "iii", "iv")


def landen_check(which: str, k, ctx: PrecisionContext) -> IdentityReport:
    """Check one of the four p=4 modulus transformations at 0 <= k < 1:

      i   K(k) = K(m1) / sqrt(1+3k^2)
      ii  K(k) = 2 K(m2) / sqrt(1+3(k')^2)
      iii E(k) = sqrt(1+3k^2)/2 E(m1) + (1-k^2)/2 K(k)
      iv  E(k) = sqrt(1+3(k')^2) E(m2) - (k')^2 K(k)

    with m1 = (8(1+k^2)k^2/(1+3k^2)^2)^(1/4) and
    m2 = sqrt((1-(k')^2)/(1+3(k')^2))."""
    if which not in LANDEN_ITEMS:
        raise DomainError(f"which must be one of {LANDEN_ITEMS}")
    guard = ctx.bits + GUARD_BITS
    with gmpy2.context(precision=guard):
        kg = mpfr(k)
        if not 0 <= kg < 1:
            raise DomainError(f"landen_check requires 0 <= k < 1, got {kg}")
        k2 = kg * kg
        k4 = k2 * k2
        kp2 = gmpy2.sqrt(1 - k4)  # (k')**2
        s1 = gmpy2.sqrt(1 + 3 * k2)
        s2 = gmpy2.sqrt(1 + 3 * kp2)
        m1_arg = gmpy2.rootn(8 * (1 + k2) * k2, 4) / s1
        m2_arg = gmpy2.sqrt((1 - kp2) / (1 + 3 * kp2))
        tol = 8 * mpfr(ctx.quad_tol)
    m = modulus(4, kg, ctx)
    if which == "i":
        lhs = K_p(m, ctx)
        Km1 = K_p(modulus(4, m1_arg, ctx), ctx)
        with gmpy2.context(precision=guard):
            rhs = mpfr(Km1) / s1
    elif which == "ii":
        lhs = K_p(m, ctx)
        Km2 = K_p(modulus(4, m2_arg, ctx), ctx)
        with gmpy2.context(precision=guard):
            rhs = 2 * mpfr(Km2) / s2
    elif which == "iii":
        lhs = E_p(m, ctx)
        Em1 = E_p(modulus(4, m1_arg, ctx), ctx)
        Kk = K_p(m, ctx)
        with gmpy2.context(precision=guard):
            rhs = s1 / 2 * mpfr(Em1) + (1 - k2) / 2 * mpfr(Kk)
    else:
        lhs = E_p(m, ctx)
        Em2 = E_p(modulus(4, m2_arg, ctx), ctx)
        Kk = K_p(m, ctx)
        with gmpy2.context(precision=guard):
            rhs = s2 * mpfr(Em2) - kp2 * mpfr(Kk)
    return make_report(
        f"landen-{which}", (("k", kg),), lhs, rhs, tol, prec=guard)
