"""Weighted polynomial approximation numerics for discrete measures and entire functions."""
from .errors import InputError, InvariantViolation, NonConvergence, PolyDensityError
from .measure import DiscreteMeasure, TiltMode, from_quadrature, load_measure, moments, save_measure, tilt
from .weights import GridWeight, classify_space, upper_baire
from .extremal import LP, SUPW, M_n, NormParam, ortho_basis, rho_limit, rho_n
from .density import hamburger_verdict, riesz_p2
from .entire import EntireFn, TailModel, delta_fp, load_entire, m_fp
from .divisor import build_balanced_divisor, perturbation_plan, verify_divisor
from .classes import StarPoly, lambda_functionals
from .bernstein import ThetaSpec, debranges_sum, lemma41_minimize, lemma41_objective

__version__ = "0.1.0"

__all__ = [
    "InputError", "InvariantViolation", "NonConvergence", "PolyDensityError",
    "DiscreteMeasure", "TiltMode", "from_quadrature", "load_measure", "moments", "save_measure", "tilt",
    "GridWeight", "classify_space", "upper_baire",
    "LP", "SUPW", "M_n", "NormParam", "ortho_basis", "rho_limit", "rho_n",
    "hamburger_verdict", "riesz_p2",
    "EntireFn", "TailModel", "delta_fp", "load_entire", "m_fp",
    "build_balanced_divisor", "perturbation_plan", "verify_divisor",
    "StarPoly", "lambda_functionals",
    "ThetaSpec", "debranges_sum", "lemma41_minimize", "lemma41_objective",
]
