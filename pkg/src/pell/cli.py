"""Command-line surface: digit computation (pi, pi_p), identity
verification over documented default grids, and iteration trace export.

Exit codes: 0 success / all checks pass, 1 at least one check failed,
2 usage error, 3 numerical failure (non-convergence or a failed hard
invariant). Digit output is truncated, never rounded, so prefixes are
stable when the precision is raised.
"""

from __future__ import annotations

import sys

import click
import gmpy2
from gmpy2 import mpfr

from .agm import (
    MeanKind,
    invariance_check,
    lemma_ij_check,
    mean_value_check,
    prop_ek_check,
    run,
    trace_to_csv,
    trace_to_json,
)
from .errors import DomainError, NonConvergence, NonFinite, NumericalFailure
from .mpnum import PrecisionContext
from .pelliptic import (
    landen_check,
    legendre_defect,
    modulus,
    ode_residual,
    ramanujan_defect,
    ODE_SOLUTIONS,
)
from .piformulas import (
    DigitsResult,
    digits_for_bits,
    digits_result_to_json,
    machin_pi,
    pi3_formula,
    pi4_formula,
    pi_via_pi4,
    salamin_brent_pi,
    supported_digits,
)
from .ptrig import pi_p

_PARSE_BITS = 96  # parse precision for decimal flag values like 0.1

K_GRID = ("0.1", "0.3", "0.5", "0.7", "0.9")
P_GRID = ("2", "2.5", "3", "4")
ODE_P_GRID = ("2", "3", "4")
ODE_K_GRID = ("0.3", "0.5", "0.7")
X_GRID = ("0", "0.1", "0.2", "0.3", "0.4", "0.5")
PAIR_GRID = (("1", "0.8408964152537145430311254762332148950289"),
             ("1", "0.5"), ("1.5", "0.5"))

IDENTITIES = ("legendre", "landen-i", "landen-ii", "landen-iii", "landen-iv",
              "lemma-ij", "invariance", "prop-ek", "ode", "ramanujan",
              "gauss-p2", "k3-formula", "k4-formula")


def _parse(value: str) -> mpfr:
    try:
        return mpfr(value, _PARSE_BITS)
    except ValueError:
        raise click.UsageError(f"not a number: {value!r}")


def _resolve_bits(bits: int, digits) -> int:
    if digits is not None:
        return max(64, digits_for_bits(digits))
    return bits


def _truncated(value, digits: int) -> str:
    """First `digits` significant decimal digits of a positive value,
    truncated, with the decimal point placed by the exponent."""
    ds, exp, _ = value.digits(10, digits + 8)
    ds = ds.lstrip("-")
    if exp >= digits:
        return ds[:digits]
    if exp >= 1:
        return ds[:exp] + "." + ds[exp:digits]
    return "0." + "0" * (-exp) + ds[:digits]


def _fmt(x) -> str:
    if isinstance(x, (int, str)):
        return str(x)
    return f"{float(mpfr(x, 64)):g}"


def _sci(x, sig: int = 4) -> str:
    """Scientific notation built from exact digits; never underflows the
    way float conversion would at very high bit counts."""
    v = mpfr(x, 64)
    if v == 0:
        return "0.0e+00"
    ds, exp, _ = v.digits(10, sig)
    sign = "-" if ds.startswith("-") else ""
    ds = ds.lstrip("-")
    return f"{sign}{ds[0]}.{ds[1:sig]}e{exp - 1:+03d}"


def _echo_report(report) -> bool:
    inputs = " ".join(f"{name}={_fmt(v)}" for name, v in report.inputs)
    status = "PASS" if report.passed else "FAIL"
    click.echo(f"{report.identity_id} {inputs} "
               f"defect={_sci(report.abs_defect)} "
               f"tol={_sci(report.tol)} {status}")
    return report.passed


def _report_dict(report) -> dict:
    return {
        "identity": report.identity_id,
        "inputs": {name: str(v) for name, v in report.inputs},
        "lhs": str(report.lhs),
        "rhs": str(report.rhs),
        "abs_defect": str(report.abs_defect),
        "rel_defect": str(report.rel_defect),
        "tol": str(report.tol),
        "pass": report.passed,
    }


@click.group()
def main():
    """Complete p-elliptic integrals, mean iterations and pi formulas."""


@main.command("pi")
@click.option("--method", type=click.Choice(["machin", "salamin-brent", "pi4"]),
              default="salamin-brent", show_default=True)
@click.option("--digits", type=click.IntRange(min=1), default=None,
              help="Significant digits to print; overrides --bits.")
@click.option("--bits", type=click.IntRange(min=64), default=256,
              envvar="PELL_BITS", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Emit the result schema.")
@click.option("--times-sqrt2", is_flag=True,
              help="With --method pi4: return sqrt(2)*pi_4, i.e. pi.")
def cmd_pi(method, digits, bits, as_json, times_sqrt2):
    """Compute pi (or pi_4) to the requested precision."""
    if times_sqrt2 and method != "pi4":
        raise click.UsageError("--times-sqrt2 requires --method pi4")
    bits = _resolve_bits(bits, digits)
    ctx = PrecisionContext(bits=bits)
    try:
        if method == "machin":
            res = DigitsResult(machin_pi(ctx), supported_digits(bits), 0,
                               None, "MACHIN")
        elif method == "salamin-brent":
            res = salamin_brent_pi(ctx)
        elif times_sqrt2:
            res = pi_via_pi4(ctx)
        else:
            res = pi4_formula(ctx)
    except (NonConvergence, NumericalFailure, NonFinite) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    if as_json:
        click.echo(digits_result_to_json(res, bits))
    else:
        click.echo(_truncated(res.value, digits or res.requested_digits))


@main.command("pip")
@click.option("--p", "p_str", required=True, help="Exponent p > 1.")
@click.option("--digits", type=click.IntRange(min=1), default=None)
@click.option("--bits", type=click.IntRange(min=64), default=256,
              envvar="PELL_BITS", show_default=True)
@click.option("--via", type=click.Choice(["closed", "agm"]), default="closed",
              show_default=True,
              help="agm uses the order-3/4 formulas (p must be 3 or 4).")
@click.option("--json", "as_json", is_flag=True)
def cmd_pip(p_str, digits, bits, via, as_json):
    """Compute pi_p = 2 arcsin_p(1)."""
    p = _parse(p_str)
    if not p > 1:
        raise click.UsageError(f"p must be > 1, got {p_str}")
    bits = _resolve_bits(bits, digits)
    ctx = PrecisionContext(bits=bits)
    try:
        if via == "agm":
            if p == 3:
                res = pi3_formula(ctx)
            elif p == 4:
                res = pi4_formula(ctx)
            else:
                raise click.UsageError("--via agm requires p in {3, 4}")
            value = res.value
        else:
            res = None
            value = pi_p(p, ctx)
    except (NonConvergence, NumericalFailure, NonFinite) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if as_json:
        if res is not None:
            click.echo(digits_result_to_json(res, bits))
        else:
            import json as _json
            click.echo(_json.dumps({
                "method": "CLOSED_FORM", "p": p_str,
                "digits": digits or supported_digits(bits),
                "value": str(value), "bits": bits}, indent=2))
    else:
        click.echo(_truncated(value, digits or supported_digits(bits)))


def _verify_reports(identity, ctx, p_str, k_str, a_str, b_str):
    """Yield IdentityReports for one identity over its default grid, or
    over the single point the user pinned with flags."""
    ks = [k_str] if k_str else list(K_GRID)
    ps = [p_str] if p_str else list(P_GRID)

    if identity == "legendre":
        for p in ps:
            for k in ks:
                yield legendre_defect(_parse(p), _parse(k), ctx)
    elif identity.startswith("landen-"):
        which = identity.split("-", 1)[1]
        for k in ks:
            yield landen_check(which, _parse(k), ctx)
    elif identity == "lemma-ij":
        for a, b in _pairs(a_str, b_str):
            yield lemma_ij_check(a, b, ctx)
    elif identity == "prop-ek":
        for a, b in _pairs(a_str, b_str):
            yield prop_ek_check(a, b, ctx)
    elif identity == "invariance":
        kinds = [_kind_from_p(p_str)] if p_str else list(MeanKind)
        for kind in kinds:
            for a, b in _pairs(a_str, b_str):
                yield invariance_check(kind, a, b, ctx)
    elif identity == "ode":
        ode_ps = [p_str] if p_str else list(ODE_P_GRID)
        ode_ks = [k_str] if k_str else list(ODE_K_GRID)
        for p in ode_ps:
            for k in ode_ks:
                m = modulus(_parse(p), _parse(k), ctx)
                for which in ODE_SOLUTIONS:
                    yield ode_residual(which, m, ctx)
    elif identity == "ramanujan":
        xs = [k_str] if k_str else list(X_GRID)
        for x in xs:
            yield ramanujan_defect(_parse(x), ctx)
    else:
        kind = {"gauss-p2": MeanKind.P2, "k3-formula": MeanKind.P3,
                "k4-formula": MeanKind.P4}[identity]
        for k in ks:
            yield mean_value_check(kind, _parse(k), ctx)


def _pairs(a_str, b_str):
    if a_str or b_str:
        if not (a_str and b_str):
            raise click.UsageError("--a and --b must be given together")
        return [(_parse(a_str), _parse(b_str))]
    return [(_parse(a), _parse(b)) for a, b in PAIR_GRID]


def _kind_from_p(p_str):
    try:
        return MeanKind(int(p_str))
    except (ValueError, KeyError):
        raise click.UsageError(f"invariance needs p in {{2,3,4}}, got {p_str}")


@main.command("verify")
@click.option("--identity", type=click.Choice(IDENTITIES), required=True)
@click.option("--p", "p_str", default=None,
              help="Pin the exponent (default: documented grid).")
@click.option("--k", "k_str", default=None,
              help="Pin the modulus (x for ramanujan).")
@click.option("--a", "a_str", default=None, help="Pair value a (with --b).")
@click.option("--b", "b_str", default=None, help="Pair value b (with --a).")
@click.option("--bits", type=click.IntRange(min=64), default=256,
              envvar="PELL_BITS", show_default=True)
@click.option("--json", "as_json", is_flag=True)
def cmd_verify(identity, p_str, k_str, a_str, b_str, bits, as_json):
    """Check one identity; defaults: k in {0.1,...,0.9 step 0.2},
    p in {2, 2.5, 3, 4} (ode: p in {2,3,4}, k in {0.3,0.5,0.7};
    ramanujan: x in {0,...,0.5 step 0.1}; pair checks use
    (1, 2^(-1/4)), (1, 0.5), (1.5, 0.5))."""
    ctx = PrecisionContext(bits=bits)
    all_pass = True
    reports = []
    try:
        for report in _verify_reports(identity, ctx, p_str, k_str, a_str, b_str):
            if as_json:
                reports.append(_report_dict(report))
                all_pass = all_pass and report.passed
            else:
                all_pass = _echo_report(report) and all_pass
    except (NonConvergence, NumericalFailure, NonFinite) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if as_json:
        import json as _json
        click.echo(_json.dumps(reports, indent=2))
    sys.exit(0 if all_pass else 1)


@main.command("trace")
@click.argument("kind", type=click.Choice(["p2", "p3", "p4"]))
@click.argument("a")
@click.argument("b")
@click.option("--bits", type=click.IntRange(min=64), default=256,
              envvar="PELL_BITS", show_default=True)
@click.option("--csv", "as_csv", is_flag=True)
@click.option("--json", "as_json", is_flag=True)
def cmd_trace(kind, a, b, bits, as_csv, as_json):
    """Print the mean-iteration rows from the pair (A, B)."""
    if as_csv and as_json:
        raise click.UsageError("--csv and --json are mutually exclusive")
    ctx = PrecisionContext(bits=bits)
    try:
        trace = run(MeanKind[kind.upper()], _parse(a), _parse(b), ctx)
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except (NonConvergence, NumericalFailure, NonFinite) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    if as_json:
        click.echo(trace_to_json(trace))
    elif as_csv:
        click.echo(trace_to_csv(trace), nl=False)
        click.echo(f"limit,{trace.limit}")
    else:
        for r in trace.rows:
            click.echo(f"{r.n:3d}  a={r.a}  b={r.b}  c={r.c}")
        click.echo(f"limit = {trace.limit} ({trace.iterations} iterations)")


if __name__ == "__main__":
    main()
