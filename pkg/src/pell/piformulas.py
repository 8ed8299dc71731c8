"""Digit computations of pi, pi_3 and pi_4 from the mean iterations, plus
an AGM-free Machin-type arctangent oracle for cross-checking.

Each formula has the shape (factor) * M**2 / D with D = 1 - (series over
the iteration rows):

  pi   = 4 M_2(1, 2**(-1/2))**2 / (1 - sum_{n>=1} 2**(n+1) c_n**2)
  pi_3 = 2 M_3(1, 2**(-1/3))**2 / (1 - 2 sum_{n>=1} 3**n (a_n + c_n) c_n)
  pi_4 = 2 M_4(1, 2**(-1/4))**2 / (1 - sum_{n>=1} 2**(n+1) c_n**2)
  pi   = sqrt(2) * pi_4 (computed directly as 2 sqrt(2) M**2 / D)

The iteration is continued until the just-added series term falls below
2**(4-bits); the terms lag the pair gap (they shrink like its square root
for order 4), so this runs one or two steps past the plain gap-based
stopping rule and leaves a dropped tail of order 2**(4-2*bits)."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import gmpy2
from gmpy2 import mpfr

from .agm import AgmRow, AgmTrace, MeanKind, _c_next, _c_of, _step_raw
from .errors import NonConvergence, NumericalFailure
from .mpnum import GUARD_BITS, PrecisionContext, RealValue, _round_to

METHODS = ("MACHIN", "SALAMIN_BRENT", "PI3", "PI4", "PI_VIA_PI4")


@dataclass(frozen=True)
class DigitsResult:
    value: RealValue
    requested_digits: int
    iterations_used: int
    trace: Optional[AgmTrace]
    method: str


def supported_digits(bits: int) -> int:
    """Largest digit count with requested_digits*log2(10) + 16 <= bits."""
    return math.floor((bits - 16) / math.log2(10))


def digits_for_bits(digits: int) -> int:
    """Smallest bit count supporting the requested digits, by the same
    16-bit margin."""
    return math.ceil(digits * math.log2(10)) + 16


def digits_result_to_json(res: DigitsResult, bits: int) -> str:
    return json.dumps({
        "method": res.method,
        "digits": res.requested_digits,
        "value": str(res.value),
        "iterations": res.iterations_used,
        "bits": bits,
    }, indent=2)


def _arctan_inv(x: int, prec: int):
    """arctan(1/x) for integer x >= 2 by the alternating Taylor series in
    the caller-selected precision, truncated below 2**(8-prec)."""
    with gmpy2.context(precision=prec):
        inv = 1 / mpfr(x)
        inv2 = inv * inv
        thresh = mpfr(2) ** (8 - prec)
        power = inv
        total = mpfr(0)
        j = 0
        while True:
            term = power / (2 * j + 1)
            total = total - term if j % 2 else total + term
            if term < thresh:
                return total
            power *= inv2
            j += 1


def machin_pi(ctx: PrecisionContext) -> RealValue:
    """pi = 16 arctan(1/5) - 4 arctan(1/239); AGM-free oracle."""
    prec = ctx.bits + GUARD_BITS
    with gmpy2.context(precision=prec):
        value = 16 * _arctan_inv(5, prec) - 4 * _arctan_inv(239, prec)
    return _round_to(value, ctx.bits)


def _series_engine(kind: MeanKind, ctx: PrecisionContext):
    """Run the iteration from (1, 2**(-1/p)) accumulating the formula
    series; returns (M, D, rows, iterations) at working precision.

    Two stopping paths: normally the just-added term falls below the
    2**(4-bits) floor. If instead the pair gap drops under 2**(16-work)
    first, the computed difference is about to become rounding noise; the
    unadded term is then provably below the floor (it is bounded by
    2**(120-work) for every n <= 64 and all three orders, and work exceeds
    bits + 124), so the loop stops without emitting a noise row."""
    work = ctx.bits + 4 * GUARD_BITS
    p = kind.value
    with gmpy2.context(precision=work):
        a = mpfr(1)
        b = 1 / gmpy2.rootn(mpfr(2), p)
        floor_ = mpfr(2) ** (4 - ctx.bits)
        noise = mpfr(2) ** (16 - work)
        total = mpfr(0)
        rows = [AgmRow(0, _round_to(a, ctx.bits), _round_to(b, ctx.bits),
                       _round_to(_c_of(kind, a, b), ctx.bits))]
        converged = None
        for n in range(1, ctx.max_iters + 1):
            if a - b < noise:
                converged = n - 1
                break
            c = _c_next(kind, a, b)
            a, b = _step_raw(kind, a, b)
            rows.append(AgmRow(n, _round_to(a, ctx.bits),
                               _round_to(b, ctx.bits), _round_to(c, ctx.bits)))
            if kind is MeanKind.P3:
                term = 2 * mpfr(3) ** n * (a + c) * c
            else:
                term = (1 << (n + 1)) * c * c
            total += term
            if term < floor_:
                converged = n
                break
        if converged is None:
            raise NonConvergence(
                f"series term never fell below 2^(4-bits) "
                f"in {ctx.max_iters} steps")
        d = 1 - total
        if not d > mpfr("0.5"):
            raise NumericalFailure(f"series denominator {d} is not above 1/2")
    return a, d, rows, converged


def _formula(kind: MeanKind, method: str, factor_num, ctx: PrecisionContext):
    m_val, d_val, rows, iters = _series_engine(kind, ctx)
    work = ctx.bits + 2 * GUARD_BITS
    with gmpy2.context(precision=work):
        value = factor_num(m_val) / d_val
    trace = AgmTrace(kind, tuple(rows), _round_to(m_val, ctx.bits), iters)
    return DigitsResult(
        value=_round_to(value, ctx.bits),
        requested_digits=supported_digits(ctx.bits),
        iterations_used=iters,
        trace=trace,
        method=method,
    )


def salamin_brent_pi(ctx: PrecisionContext) -> DigitsResult:
    """pi from the order-2 iteration."""
    return _formula(MeanKind.P2, "SALAMIN_BRENT", lambda m: 4 * m * m, ctx)


def pi3_formula(ctx: PrecisionContext) -> DigitsResult:
    """pi_3 = 4 pi / (3 sqrt(3)) from the order-3 iteration."""
    return _formula(MeanKind.P3, "PI3", lambda m: 2 * m * m, ctx)


def pi4_formula(ctx: PrecisionContext) -> DigitsResult:
    """pi_4 = pi / sqrt(2) from the order-4 iteration."""
    return _formula(MeanKind.P4, "PI4", lambda m: 2 * m * m, ctx)


def pi_via_pi4(ctx: PrecisionContext) -> DigitsResult:
    """pi recovered from the order-4 iteration as 2 sqrt(2) M**2 / D."""
    return _formula(MeanKind.P4, "PI_VIA_PI4",
                    lambda m: 2 * gmpy2.sqrt(mpfr(2)) * m * m, ctx)
