"""Exact scalars and dense exact linear algebra."""

from .field import (
    MAX_ORDER,
    MIN_ORDER,
    QQ,
    FieldDescriptor,
    FieldElement,
    FieldMismatchError,
    cyclotomic_polynomial,
    field_arith,
    format_element,
    lambda_bracket,
    lambda_bracket_is_root,
)
from .linalg import (
    ExactMatrix,
    Subspace,
    invariant_closure,
    kernel,
    kron,
    largest_invariant_subspace,
    preimage,
    rank,
    rref,
    solve_right,
)
from .textio import ParseError, parse_expression

__all__ = [
    "MAX_ORDER",
    "MIN_ORDER",
    "QQ",
    "ExactMatrix",
    "FieldDescriptor",
    "FieldElement",
    "FieldMismatchError",
    "ParseError",
    "Subspace",
    "cyclotomic_polynomial",
    "field_arith",
    "format_element",
    "invariant_closure",
    "kernel",
    "kron",
    "lambda_bracket",
    "lambda_bracket_is_root",
    "largest_invariant_subspace",
    "parse_expression",
    "preimage",
    "rank",
    "rref",
    "solve_right",
]
