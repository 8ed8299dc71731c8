"""Arbitrary-precision complete p-elliptic integrals, generalized
trigonometric functions, AGM-type mean iterations for p = 2, 3, 4, and the
quadratically convergent formulas for pi and pi_p built on them, plus a
verification engine that numerically certifies the identities tying them
together."""

from .errors import (
    DomainError,
    InvalidDomain,
    NonConvergence,
    NonFinite,
    NumericalFailure,
    PellError,
)
from .mpnum import PrecisionContext, QuadResult, RealValue, integrate, sum_ordered
from .ptrig import PExponent, arcsin_p, cos_p, pi_p, sin_p
from .pelliptic import (
    DERIVATIVE_TARGETS,
    E_p,
    I_p,
    IdentityReport,
    J_p,
    K_p,
    LANDEN_ITEMS,
    Modulus,
    ODE_SOLUTIONS,
    dE_dk,
    dK_dk,
    derivative_check,
    hyp2f1,
    landen_check,
    legendre_defect,
    make_report,
    modulus,
    ode_residual,
    ramanujan_defect,
)
from .agm import (
    AgmRow,
    AgmTrace,
    MeanKind,
    contraction_check,
    homogeneity_check,
    invariance_check,
    kappa_consistency_check,
    lemma_ij_check,
    mean_value_check,
    prop_ek_check,
    run,
    step,
    trace_to_csv,
    trace_to_json,
)
from .piformulas import (
    METHODS,
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

__version__ = "0.1.0"

__all__ = [
    "AgmRow",
    "AgmTrace",
    "DERIVATIVE_TARGETS",
    "DigitsResult",
    "DomainError",
    "E_p",
    "I_p",
    "IdentityReport",
    "InvalidDomain",
    "J_p",
    "K_p",
    "LANDEN_ITEMS",
    "METHODS",
    "MeanKind",
    "Modulus",
    "NonConvergence",
    "NonFinite",
    "NumericalFailure",
    "ODE_SOLUTIONS",
    "PExponent",
    "PellError",
    "PrecisionContext",
    "QuadResult",
    "RealValue",
    "arcsin_p",
    "contraction_check",
    "cos_p",
    "dE_dk",
    "dK_dk",
    "derivative_check",
    "digits_for_bits",
    "digits_result_to_json",
    "homogeneity_check",
    "hyp2f1",
    "integrate",
    "invariance_check",
    "kappa_consistency_check",
    "landen_check",
    "legendre_defect",
    "lemma_ij_check",
    "machin_pi",
    "make_report",
    "mean_value_check",
    "modulus",
    "ode_residual",
    "pi3_formula",
    "pi4_formula",
    "pi_p",
    "pi_via_pi4",
    "prop_ek_check",
    "ramanujan_defect",
    "run",
    "salamin_brent_pi",
    "sin_p",
    "step",
    "sum_ordered",
    "supported_digits",
    "trace_to_csv",
    "trace_to_json",
    "__version__",
]
