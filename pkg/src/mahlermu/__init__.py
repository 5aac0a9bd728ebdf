"""Irrationality exponents of Mahler numbers by exact polynomial continued fractions."""

from .algebra import Polynomial, graeffe, poly_compose_power, poly_deg, poly_divrem, poly_gcd
from .cfrac import CFExpansion, Convergent, certified_degrees, cf_expand, convergent_check, error_degree
from .config import RunConfig
from .errors import MahlerError
from .exponent import ExponentResult, check_b_admissible, compute_mu, detect_period, periodic_limit
from .gaps import (
    Gap,
    GapRecord,
    PrimitiveSequence,
    classify,
    contribution_bounds,
    direct_successor,
    enumerate_gaps,
    iterate_primitive,
    search_horizon,
)
from .numeric import ApproximationRecord, build_approx, empirical_exponent, eval_f
from .rationality import (
    FactorSplit,
    RationalityReport,
    cyclotomic_poly,
    lambda_reduction_search,
    lemma42_report,
    phi_compose_factorization,
    r_s_split,
    rad,
    rationality_verdict,
    sigma_multiplicity,
    split_factors,
    strip_common_cyclotomic,
    strip_z_powers,
)
from .series import LaurentSeries, MahlerEquation, expand, expand_any, extend, infer_degree, load_equation, residual_degree

__version__ = "0.1.0"
