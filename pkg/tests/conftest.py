"""Shared fixtures and high-precision comparison helpers.

Comparisons must run inside an explicit gmpy2 context: arithmetic on mpfr
values at the ambient 53-bit precision would destroy exactly the digits
under test.
"""

import gmpy2
from gmpy2 import mpfr
import pytest

from pell import PrecisionContext

# Reference strings carry 85 digits (~282 bits); parse with headroom.
REF_BITS = 300
CMP_BITS = 320


def ref(s: str) -> mpfr:
    return gmpy2.mpfr(s, REF_BITS)


def err_log2(x, y) -> float:
    """log2 |x - y| evaluated at comparison precision; -inf when equal."""
    with gmpy2.context(precision=CMP_BITS):
        d = abs(mpfr(x) - mpfr(y))
        if d == 0:
            return float("-inf")
        return float(gmpy2.log2(d))


def assert_close(x, y, tol_log2: float, label: str = ""):
    e = err_log2(x, y)
    assert e <= tol_log2, (
        f"{label or 'values'} differ by 2**{e:.1f} (tolerance 2**{tol_log2})")


def assert_rel_close(x, y, tol_log2: float, label: str = ""):
    """|x - y| <= 2**tol_log2 * max(1, |y|)."""
    with gmpy2.context(precision=CMP_BITS):
        scale = max(mpfr(1), abs(mpfr(y)))
        d = abs(mpfr(x) - mpfr(y))
        ok = d <= mpfr(2) ** tol_log2 * scale
        shown = float("-inf") if d == 0 else float(gmpy2.log2(d / scale))
    assert ok, (
        f"{label or 'values'} differ by 2**{shown:.1f} of scale "
        f"(tolerance 2**{tol_log2})")


@pytest.fixture(scope="session")
def ctx128():
    return PrecisionContext(bits=128)


@pytest.fixture(scope="session")
def ctx256():
    return PrecisionContext(bits=256)


@pytest.fixture(scope="session")
def ctx512():
    return PrecisionContext(bits=512)
