"""Quadrature engine, elementary wrappers, summation, precision contexts."""

import threading

import gmpy2
from gmpy2 import mpfr
import pytest

import pell.mpnum as mpnum
from pell import (
    DomainError,
    InvalidDomain,
    NonConvergence,
    NonFinite,
    PrecisionContext,
    QuadResult,
    integrate,
    sum_ordered,
)
from conftest import assert_close, err_log2, ref
import reference_values as rv


# ---------------------------------------------------------------------------
# PrecisionContext
# ---------------------------------------------------------------------------

def test_context_defaults(ctx256):
    assert ctx256.bits == 256
    assert err_log2(ctx256.quad_tol, mpfr(2) ** -246) == float("-inf")
    assert ctx256.max_quad_level == 12
    assert ctx256.max_iters == 64


def test_context_validation():
    with pytest.raises(DomainError):
        PrecisionContext(bits=32)
    with pytest.raises(DomainError):
        PrecisionContext(bits=128.0)
    with pytest.raises(DomainError):
        PrecisionContext(bits=128, quad_tol=2)
    with pytest.raises(DomainError):
        PrecisionContext(bits=128, quad_tol=0)
    with pytest.raises(DomainError):
        PrecisionContext(bits=128, max_quad_level=0)
    with pytest.raises(DomainError):
        PrecisionContext(bits=128, max_iters=0)


def test_with_quad_tol(ctx256):
    loose = ctx256.with_quad_tol(mpfr(2) ** -100)
    assert loose.bits == ctx256.bits
    assert loose.quad_tol == mpfr(2) ** -100
    assert ctx256.quad_tol != loose.quad_tol


def test_quadresult_rejects_negative_error():
    with pytest.raises(ValueError):
        QuadResult(value=mpfr(1), err_estimate=mpfr(-1),
                   levels_used=1, evaluations=1)


# ---------------------------------------------------------------------------
# integrate: accuracy against analytically known integrals
# ---------------------------------------------------------------------------

def test_integrate_polynomial(ctx256):
    res = integrate(lambda t: t * t, 0, 1, ctx256)
    with gmpy2.context(precision=320):
        third = mpfr(1) / 3
    assert_close(res.value, third, -244, "integral of t^2 over [0,1]")
    assert res.levels_used >= 1
    assert res.evaluations > 0
    assert res.err_estimate >= 0


def test_integrate_exp(ctx256):
    res = integrate(gmpy2.exp, 0, 1, ctx256)
    with gmpy2.context(precision=320):
        expect = gmpy2.exp(mpfr(1)) - 1
    assert_close(res.value, expect, -244, "integral of exp over [0,1]")


def test_integrate_additive(ctx256):
    whole = integrate(gmpy2.exp, 0, 1, ctx256).value
    left = integrate(gmpy2.exp, 0, mpfr("0.3"), ctx256).value
    right = integrate(gmpy2.exp, mpfr("0.3"), 1, ctx256).value
    with gmpy2.context(precision=320):
        split = mpfr(left) + mpfr(right)
    # 4 * quad_tol
    assert_close(whole, split, -244, "split integral")


def test_integrate_odd_function_vanishes(ctx256):
    res = integrate(lambda t: t ** 3, -1, 1, ctx256)
    assert_close(res.value, 0, -246, "odd integrand over [-1,1]")


def test_integrate_endpoint_singularity(ctx256):
    # integral of (1-t)^(-1/2) over [0,1] = 2
    f = lambda t: 1 / gmpy2.sqrt(1 - t)
    res = integrate(f, 0, 1, ctx256)
    assert_close(res.value, 2, -244, "singular endpoint integral")


def test_integrate_error_shrinks_with_bits(ctx128, ctx256):
    f = lambda t: 4 / (1 + t * t)  # integrates to pi over [0,1]
    pi_true = ref(rv.PI)
    e128 = err_log2(integrate(f, 0, 1, ctx128).value, pi_true)
    e256 = err_log2(integrate(f, 0, 1, ctx256).value, pi_true)
    assert e256 <= e128
    assert e128 <= -116  # 4 * quad_tol at 128 bits


# ---------------------------------------------------------------------------
# integrate: failure modes
# ---------------------------------------------------------------------------

def test_integrate_rejects_empty_interval(ctx256):
    with pytest.raises(InvalidDomain):
        integrate(lambda t: t, 1, 1, ctx256)
    with pytest.raises(InvalidDomain):
        integrate(lambda t: t, 2, 1, ctx256)


def test_integrate_nonfinite_integrand(ctx256):
    with pytest.raises(NonFinite):
        integrate(lambda t: mpfr("nan"), 0, 1, ctx256)
    # pole exactly at the interval center hits the level-0 center node
    with pytest.raises(NonFinite):
        integrate(lambda t: 1 / (t - mpfr("0.5")), 0, 1, ctx256)


def test_integrate_nonconvergence_carries_best_value():
    ctx = PrecisionContext(bits=256, max_quad_level=1)
    with pytest.raises(NonConvergence) as exc:
        integrate(gmpy2.exp, 0, 1, ctx)
    assert exc.value.value is not None
    with gmpy2.context(precision=320):
        rough = abs(mpfr(exc.value.value) - (gmpy2.exp(mpfr(1)) - 1))
        assert rough < mpfr("1e-3")  # coarse but already close


# ---------------------------------------------------------------------------
# determinism
# ---------------------------------------------------------------------------

def test_integrate_deterministic(ctx256):
    f = lambda t: gmpy2.exp(-t * t)
    a = integrate(f, 0, 1, ctx256)
    b = integrate(f, 0, 1, ctx256)
    assert gmpy2.to_binary(a.value) == gmpy2.to_binary(b.value)
    assert a.levels_used == b.levels_used
    assert a.evaluations == b.evaluations


def test_integrate_thread_determinism():
    # fresh precision so every thread races on cold node-table entries
    ctx = PrecisionContext(bits=193)
    results = [None] * 8

    def work(i):
        results[i] = integrate(lambda t: gmpy2.exp(-t * t), 0, 1, ctx).value

    threads = [threading.Thread(target=work, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    blobs = {gmpy2.to_binary(r) for r in results}
    assert len(blobs) == 1


# ---------------------------------------------------------------------------
# elementary wrappers
# ---------------------------------------------------------------------------

def test_pi_matches_reference(ctx256):
    assert_close(mpnum.pi(ctx256), ref(rv.PI), -254, "pi")


def test_exp_log_roundtrip(ctx256):
    x = mpfr("1.7182818")
    back = mpnum.log(mpnum.exp(x, ctx256), ctx256)
    assert_close(back, x, -250, "log(exp(x))")


def test_sin_at_pi_over_6(ctx256):
    with gmpy2.context(precision=320):
        theta = mpfr(ref(rv.PI)) / 6
    assert_close(mpnum.sin(theta, ctx256), mpfr("0.5"), -250, "sin(pi/6)")


def test_pow_and_roots(ctx256):
    r = mpnum.pow(2, mpfr("0.5"), ctx256)
    with gmpy2.context(precision=320):
        sq = mpfr(r) * mpfr(r)
    assert_close(sq, 2, -250, "sqrt(2)^2")
    assert mpnum.pow(-2, 3, ctx256) == -8
    cube = mpnum.nth_root(2, 3, ctx256)
    with gmpy2.context(precision=320):
        assert_close(mpfr(cube) ** 3, 2, -250, "cbrt(2)^3")
    assert mpnum.nth_root(0, 4, ctx256) == 0


def test_elementary_domain_errors(ctx256):
    with pytest.raises(DomainError):
        mpnum.log(0, ctx256)
    with pytest.raises(DomainError):
        mpnum.log(-1, ctx256)
    with pytest.raises(DomainError):
        mpnum.pow(-1, mpfr("0.5"), ctx256)
    with pytest.raises(DomainError):
        mpnum.pow(0, -1, ctx256)
    with pytest.raises(DomainError):
        mpnum.nth_root(-1, 2, ctx256)
    with pytest.raises(DomainError):
        mpnum.nth_root(2, 0, ctx256)
    with pytest.raises(DomainError):
        mpnum.nth_root(2, mpfr(3), ctx256)


# ---------------------------------------------------------------------------
# sum_ordered
# ---------------------------------------------------------------------------

def test_sum_ordered_trivia(ctx256):
    assert sum_ordered([], ctx256) == 0
    assert sum_ordered([1, -1], ctx256) == 0


def test_sum_ordered_exact_powers_of_two(ctx256):
    terms = [mpfr(2) ** -200] * 1024
    assert sum_ordered(terms, ctx256) == mpfr(2) ** -190


def test_sum_ordered_compensation(ctx256):
    # the tiny middle term is below one ulp of the running sum at guard
    # precision; plain summation would lose it entirely
    tiny = mpfr(2) ** -300
    assert sum_ordered([1, tiny, -1], ctx256) == tiny


def test_sum_ordered_explicit_precision():
    tiny = mpfr(2) ** -100
    out = sum_ordered([1, tiny, -1], precision=64)
    assert out == tiny
