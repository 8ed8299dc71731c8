"""Arithmetic-geometric mean iterations of orders 2, 3 and 4.

Each iteration carries a pair a_n >= b_n > 0 to a common limit M(a, b);
row n also records c_n = (a_n**p - b_n**p)**(1/p). Update rules:

  P2: a' = (a+b)/2            b' = sqrt(a b)                    (quadratic)
  P3: a' = (a+2b)/3           b' = ((a^2+ab+b^2) b / 3)^(1/3)   (cubic)
  P4: a' = sqrt((a^2+3b^2)/4) b' = ((a^2+b^2) b^2 / 2)^(1/4)    (quadratic)

The module also provides the checks tying the iterations to the
two-parameter integrals: the per-step invariants, the first-kind integral
evaluated through the limit, the one-step integral identity for order 4,
the quartic series reconstruction of J from I, the kappa recurrence, and
homogeneity/contraction structure checks.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from typing import Tuple

import gmpy2
from gmpy2 import mpfr

from .errors import DomainError, NonConvergence
from .mpnum import GUARD_BITS, PrecisionContext, RealValue, _round_to
from .pelliptic import I_p, J_p, K_p, IdentityReport, make_report, modulus
from .ptrig import _pi_p_raw, _pow_plan


class MeanKind(enum.Enum):
    P2 = 2
    P3 = 3
    P4 = 4


@dataclass(frozen=True)
class AgmRow:
    n: int
    a: RealValue
    b: RealValue
    c: RealValue


@dataclass(frozen=True)
class AgmTrace:
    kind: MeanKind
    rows: Tuple[AgmRow, ...]
    limit: RealValue
    iterations: int


def _step_raw(kind: MeanKind, a, b):
    """One update in the caller's context, no rounding of its own."""
    if kind is MeanKind.P2:
        return (a + b) / 2, gmpy2.sqrt(a * b)
    if kind is MeanKind.P3:
        return (a + 2 * b) / 3, gmpy2.rootn((a * a + a * b + b * b) * b / 3, 3)
    a2 = a * a
    b2 = b * b
    return gmpy2.sqrt((a2 + 3 * b2) / 4), gmpy2.rootn((a2 + b2) * b2 / 2, 4)


def _c_of(kind: MeanKind, a, b):
    """c = (a**p - b**p)**(1/p) in the caller's context, with the
    difference factored to avoid cancellation between close a and b."""
    d = a - b
    if kind is MeanKind.P2:
        return gmpy2.sqrt(d * (a + b))
    if kind is MeanKind.P3:
        return gmpy2.rootn(d * (a * a + a * b + b * b), 3)
    return gmpy2.rootn(d * (a + b) * (a * a + b * b), 4)


def _c_next(kind: MeanKind, a, b):
    """c of the NEXT pair, written in terms of the current pair. These are
    exact algebraic identities; near convergence they are far more accurate
    than _c_of on the next pair because they difference the current pair,
    whose gap is much larger:

      P2: (a')**2 - (b')**2 = ((a-b)/2)**2
      P3: (a')**3 - (b')**3 = ((a-b)/3)**3
      P4: (a')**4 - (b')**4 = ((a**2-b**2)/4)**2

    Once the true gap falls below one ulp of the working precision the
    computed difference is rounding noise and may go negative; it is
    clamped to zero, the exact value for a = b."""
    d = max(a - b, 0)
    if kind is MeanKind.P2:
        return d / 2
    if kind is MeanKind.P3:
        return d / 3
    return gmpy2.sqrt(d * (a + b)) / 2


def _validated(a, b, prec):
    with gmpy2.context(precision=prec):
        ag = mpfr(a)
        bg = mpfr(b)
    if not (gmpy2.is_finite(ag) and gmpy2.is_finite(bg) and ag >= bg > 0):
        raise DomainError(f"mean iteration requires a >= b > 0, got a={ag} b={bg}")
    return ag, bg


def step(kind: MeanKind, a, b, ctx: PrecisionContext):
    """One iteration step; returns (a', b', c') rounded to ctx.bits with
    c' = (a'**p - b'**p)**(1/p) of the new pair."""
    prec = ctx.bits + GUARD_BITS
    ag, bg = _validated(a, b, prec)
    with gmpy2.context(precision=prec):
        an, bn = _step_raw(kind, ag, bg)
        cn = _c_of(kind, an, bn)
    return (_round_to(an, ctx.bits), _round_to(bn, ctx.bits),
            _round_to(cn, ctx.bits))


def run(kind: MeanKind, a, b, ctx: PrecisionContext) -> AgmTrace:
    """Iterate until a_n - b_n < 2**(4-bits) * a_0, recording every row
    (row 0 is the input pair). The internal state stays at guard precision;
    only the recorded rows and the limit are rounded."""
    prec = ctx.bits + GUARD_BITS
    ag, bg = _validated(a, b, prec)
    with gmpy2.context(precision=prec):
        thresh = mpfr(2) ** (4 - ctx.bits) * ag
    rows = []
    for n in range(ctx.max_iters + 1):
        with gmpy2.context(precision=prec):
            # row 0 takes the direct form; later rows use the one-step-back
            # identity, which stays relatively accurate near convergence.
            c = _c_of(kind, ag, bg) if n == 0 else c_pending
            done = ag - bg < thresh
        rows.append(AgmRow(n, _round_to(ag, ctx.bits),
                           _round_to(bg, ctx.bits), _round_to(c, ctx.bits)))
        if done:
            return AgmTrace(kind, tuple(rows), _round_to(ag, ctx.bits), n)
        with gmpy2.context(precision=prec):
            c_pending = _c_next(kind, ag, bg)
            ag, bg = _step_raw(kind, ag, bg)
    raise NonConvergence(
        f"{kind.name} mean did not converge in {ctx.max_iters} iterations")


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _dec(x) -> str:
    return str(x)


def trace_to_json(trace: AgmTrace) -> str:
    return json.dumps({
        "kind": trace.kind.name,
        "rows": [{"n": r.n, "a": _dec(r.a), "b": _dec(r.b), "c": _dec(r.c)}
                 for r in trace.rows],
        "limit": _dec(trace.limit),
        "iterations": trace.iterations,
    }, indent=2)


def trace_to_csv(trace: AgmTrace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "a", "b", "c"])
    for r in trace.rows:
        writer.writerow([r.n, _dec(r.a), _dec(r.b), _dec(r.c)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# structure checks
# ---------------------------------------------------------------------------

def homogeneity_check(kind: MeanKind, a, b, lam, ctx: PrecisionContext) -> IdentityReport:
    """M(lam*a, lam*b) = lam * M(a, b) for lam > 0."""
    prec = ctx.bits + GUARD_BITS
    with gmpy2.context(precision=prec):
        lam_g = mpfr(lam)
        if not lam_g > 0:
            raise DomainError(f"scale factor must be positive, got {lam_g}")
        ag, bg = _validated(a, b, prec)
        la = lam_g * ag
        lb = lam_g * bg
    lhs = run(kind, la, lb, ctx).limit
    base = run(kind, ag, bg, ctx).limit
    with gmpy2.context(precision=prec):
        rhs = lam_g * mpfr(base)
        tol = mpfr(2) ** (8 - ctx.bits) * max(mpfr(1), abs(rhs))
    return make_report("homogeneity",
                       (("kind", kind.value), ("a", ag), ("b", bg), ("lam", lam_g)),
                       lhs, rhs, tol, prec=prec)


def contraction_check(kind: MeanKind, a, b, ctx: PrecisionContext) -> IdentityReport:
    """a_{n+1}**2 - b_{n+1}**2 <= (a_n**2 - b_n**2)/4 along the whole trace.

    Reported lhs is the largest clamped violation (0 when the inequality
    holds everywhere), rhs is 0, and the tolerance leaves rounding slack."""
    trace = run(kind, a, b, ctx)
    prec = ctx.bits + GUARD_BITS
    with gmpy2.context(precision=prec):
        worst = mpfr(0)
        for prev, cur in zip(trace.rows, trace.rows[1:]):
            gap_prev = (mpfr(prev.a) - mpfr(prev.b)) * (mpfr(prev.a) + mpfr(prev.b))
            gap_cur = (mpfr(cur.a) - mpfr(cur.b)) * (mpfr(cur.a) + mpfr(cur.b))
            worst = max(worst, gap_cur - gap_prev / 4)
        a0 = mpfr(trace.rows[0].a)
        tol = mpfr(2) ** (8 - ctx.bits) * a0 * a0
    return make_report("contraction",
                       (("kind", kind.value), ("a", trace.rows[0].a),
                        ("b", trace.rows[0].b)),
                       worst, 0, tol, prec=prec)


def invariance_check(kind: MeanKind, a, b, ctx: PrecisionContext) -> IdentityReport:
    """The weighted first-kind integral is constant along the iteration:
    I_2(a_n, b_n), a_n * I_3(a_n, b_n), a_n**2 * I_4(a_n, b_n).

    Reported lhs is the largest |v_n - v_0| over the trace rows."""
    trace = run(kind, a, b, ctx)
    p = kind.value
    prec = ctx.bits + GUARD_BITS
    values = []
    for r in trace.rows:
        iv = I_p(r.a, r.b, p, ctx)
        with gmpy2.context(precision=prec):
            w = mpfr(r.a) ** (p - 2)
            values.append(w * mpfr(iv))
    with gmpy2.context(precision=prec):
        v0 = values[0]
        worst = max(abs(v - v0) for v in values)
        tol = mpfr(2) ** (8 - ctx.bits) * max(mpfr(1), abs(v0))
    return make_report("invariance",
                       (("kind", kind.value), ("a", trace.rows[0].a),
                        ("b", trace.rows[0].b)),
                       worst, 0, tol, prec=prec)


def mean_value_check(kind: MeanKind, k, ctx: PrecisionContext) -> IdentityReport:
    """First-kind integral through the limit:
    K_p(k) = (pi_p / 2) / M_p(1, k') for p in {2, 3, 4}."""
    p = kind.value
    m = modulus(p, k, ctx)
    if not 0 <= m.k < 1:
        raise DomainError(f"requires 0 <= k < 1, got {m.k}")
    lhs = K_p(m, ctx)
    trace = run(kind, 1, m.k_comp, ctx)
    prec = ctx.bits + GUARD_BITS
    with gmpy2.context(precision=prec):
        rhs = _pi_p_raw(mpfr(p), prec) / 2 / mpfr(trace.limit)
        tol = 8 * mpfr(ctx.quad_tol)
    ident = {2: "gauss-p2", 3: "k3-formula", 4: "k4-formula"}[p]
    return make_report(ident, (("p", p), ("k", m.k)), lhs, rhs, tol, prec=prec)


# ---------------------------------------------------------------------------
# order-4 iteration identities
# ---------------------------------------------------------------------------

def lemma_ij_check(a, b, ctx: PrecisionContext) -> IdentityReport:
    """One step of the order-4 pair identity
    2 J(a', b') - J(a, b) = a**2 b**2 I(a, b)."""
    prec = ctx.bits + GUARD_BITS
    ag, bg = _validated(a, b, prec)
    if ag == bg:
        raise DomainError("requires a > b")
    with gmpy2.context(precision=prec):
        an, bn = _step_raw(MeanKind.P4, ag, bg)
    J0 = J_p(ag, bg, 4, ctx)
    J1 = J_p(an, bn, 4, ctx)
    I0 = I_p(ag, bg, 4, ctx)
    with gmpy2.context(precision=prec):
        lhs = 2 * mpfr(J1) - mpfr(J0)
        rhs = ag * ag * bg * bg * mpfr(I0)
        tol = 8 * mpfr(ctx.quad_tol) * max(mpfr(1), abs(rhs))
    return make_report("lemma-ij", (("a", ag), ("b", bg)), lhs, rhs, tol,
                       prec=prec)


def kappa_consistency_check(a, b, ctx: PrecisionContext) -> IdentityReport:
    """One step of the order-4 reduced-modulus recurrence: with
    kappa = c/a and w = (b/a)**2, the next pair satisfies
    c'/a' = sqrt(1 - w) / sqrt(1 + 3 w).

    Checked at the input pair only; deeper in the trace the 1 - w
    cancellation amplifies representation noise past any fixed tolerance."""
    prec = ctx.bits + GUARD_BITS
    ag, bg = _validated(a, b, prec)
    if ag == bg:
        raise DomainError("requires a > b")
    with gmpy2.context(precision=prec):
        an, bn = _step_raw(MeanKind.P4, ag, bg)
        cn = _c_next(MeanKind.P4, ag, bg)
        lhs = cn / an
        w = (bg / ag) ** 2
        rhs = gmpy2.sqrt((1 - w) / (1 + 3 * w))
        tol = mpfr(2) ** (8 - ctx.bits)
    return make_report("kappa-consistency", (("a", ag), ("b", bg)),
                       lhs, rhs, tol, prec=prec)


def prop_ek_check(a, b, ctx: PrecisionContext) -> IdentityReport:
    """Series reconstruction of the order-4 second-kind integral:
    J(a, b) = (a**4 - a**2 * sum_{n>=1} 2**n c_n**2) I(a, b)
    with c_{n+1} = sqrt(a_n**2 - b_n**2) / 2.

    The iteration is continued past the usual stopping rule until the next
    series term falls below 2**(4-bits) * a**2, since the terms shrink like
    the square root of the pair gap."""
    prec = ctx.bits + GUARD_BITS
    ag, bg = _validated(a, b, prec)
    if ag == bg:
        raise DomainError("requires a > b")
    with gmpy2.context(precision=prec):
        term_floor = mpfr(2) ** (4 - ctx.bits) * ag * ag
        total = mpfr(0)
        an, bn = ag, bg
        converged = False
        for n in range(1, ctx.max_iters + 1):
            cn2 = (an - bn) * (an + bn) / 4
            an, bn = _step_raw(MeanKind.P4, an, bn)
            term = (1 << n) * cn2
            total += term
            if term < term_floor:
                converged = True
                break
    if not converged:
        raise NonConvergence(
            f"series did not reach the term floor in {ctx.max_iters} steps")
    J0 = J_p(ag, bg, 4, ctx)
    I0 = I_p(ag, bg, 4, ctx)
    with gmpy2.context(precision=prec):
        a2 = ag * ag
        rhs = (a2 * a2 - a2 * total) * mpfr(I0)
        tol = 16 * mpfr(ctx.quad_tol) * max(mpfr(1), abs(mpfr(J0)))
    return make_report("prop-ek", (("a", ag), ("b", bg)), J0, rhs, tol,
                       prec=prec)
