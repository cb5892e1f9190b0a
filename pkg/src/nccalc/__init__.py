"""Exact coordinate differential calculi on noncommutative polynomial algebras."""

from __future__ import annotations

from .calculus import (
    CommRule,
    OneForm,
    RewriteBudgetExceeded,
    apply_hom,
    diagonal_rule,
    differential,
    normalize_right,
    partial_derivative,
    partial_derivatives,
    pass_through,
    rule_from_twist,
    universal_rule,
)
from .exactmath import QQ, ExactMatrix, FieldDescriptor, FieldElement, Subspace
from .freealg import NcPoly, format_poly, parse
from .gda import (
    DiffForm,
    GdaReport,
    check_d_squared,
    freeness_check,
    gda_d,
    gda_multiply,
    gda_report,
    lambda_dims,
    lambda_relations,
    reduce_form,
)
from .optimal import (
    ConsistencyReport,
    DimensionCapExceeded,
    IdealTruncation,
    check_consistency,
    certify,
    graded_ideal_component,
    hilbert_dims,
    nondegeneracy_check,
    optimal_ideal,
)
from .twistlab import (
    Twist,
    TripleOperator,
    generalized_ybe_solve,
    hecke_check,
    hlavaty_build,
    is_gybe_witness,
    linear_condition_check,
    manin_twist,
    minus_one_in_spectrum,
    remark34_check,
    wz_ybe_check,
    ybe_check,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
