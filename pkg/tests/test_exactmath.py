from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from nccalc.exactmath import (
    QQ,
    ExactMatrix,
    FieldDescriptor,
    FieldMismatchError,
    ParseError,
    Subspace,
    cyclotomic_polynomial,
    field_arith,
    invariant_closure,
    kernel,
    kron,
    lambda_bracket,
    lambda_bracket_is_root,
    largest_invariant_subspace,
    preimage,
    rank,
    rref,
    solve_right,
)

ORDERS = [3, 4, 5, 6, 7, 8, 12]
small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def _sym_elem(a):
    z = sympy.Symbol("z")
    return sum(sympy.Rational(c.numerator, c.denominator) * z ** t for t, c in enumerate(a.coeffs))


def _sym_reduce(expr, m):
    z = sympy.Symbol("z")
    rem = sympy.rem(sympy.expand(expr), sympy.cyclotomic_poly(m, z), z)
    poly = sympy.Poly(rem, z)
    deg = sympy.totient(m)
    coeffs = list(reversed(poly.all_coeffs()))
    coeffs += [0] * (deg - len(coeffs))
    return tuple(Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in coeffs)


@pytest.mark.parametrize("m", range(1, 17))
def test_cyclotomic_polynomial_matches_sympy(m):
    z = sympy.Symbol("z")
    expected = [int(c) for c in reversed(sympy.Poly(sympy.cyclotomic_poly(m, z), z).all_coeffs())]
    assert list(cyclotomic_polynomial(m)) == expected


def test_field_descriptor_bounds():
    with pytest.raises(ValueError):
        FieldDescriptor.cyclotomic(1)
    with pytest.raises(ValueError):
        FieldDescriptor.cyclotomic(17)
    assert FieldDescriptor.cyclotomic(5).degree == 4
    assert FieldDescriptor.cyclotomic(3) is FieldDescriptor.cyclotomic(3)


def test_known_products():
    k = FieldDescriptor.cyclotomic(3)
    z = k.zeta()
    assert str(z * z) == "-1-z"
    assert z ** 3 == k.one()
    assert str(k.parse("1+2*z-z^2")) == "2+3*z"
    assert QQ.parse("1/2") + QQ.parse("1/3") == QQ.scalar(Fraction(5, 6))
    assert str(QQ.parse("1/2+1/3")) == "5/6"


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ORDERS), st.data())
def test_multiplication_matches_sympy(m, data):
    k = FieldDescriptor.cyclotomic(m)
    a = k.from_power_coeffs(data.draw(st.lists(small, min_size=k.degree, max_size=k.degree)))
    b = k.from_power_coeffs(data.draw(st.lists(small, min_size=k.degree, max_size=k.degree)))
    assert (a * b).coeffs == _sym_reduce(_sym_elem(a) * _sym_elem(b), m)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ORDERS), st.data())
def test_inverse_and_field_axioms(m, data):
    k = FieldDescriptor.cyclotomic(m)
    draw = lambda: k.from_power_coeffs(data.draw(st.lists(small, min_size=k.degree, max_size=k.degree)))
    a, b, c = draw(), draw(), draw()
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    if a:
        assert a * a.inverse() == k.one()
        assert (b / a) * a == b


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(ORDERS), st.data())
def test_format_parse_round_trip(m, data):
    k = FieldDescriptor.cyclotomic(m)
    a = k.from_power_coeffs(data.draw(st.lists(small, min_size=k.degree, max_size=k.degree)))
    assert k.parse(str(a)) == a


def test_parse_errors_and_mismatch():
    with pytest.raises(ParseError) as info:
        QQ.parse("1 + z")
    assert info.value.position == 4
    with pytest.raises(ParseError):
        QQ.parse("1/0")
    with pytest.raises(ParseError):
        QQ.parse("(1+2")
    k3, k4 = FieldDescriptor.cyclotomic(3), FieldDescriptor.cyclotomic(4)
    with pytest.raises(FieldMismatchError):
        field_arith(k3.one(), k4.one(), "add")
    with pytest.raises(ZeroDivisionError):
        QQ.one() / QQ.zero()


def test_lambda_bracket():
    k = FieldDescriptor.cyclotomic(3)
    q = k.zeta()
    assert lambda_bracket_is_root(q, 3)
    assert not lambda_bracket_is_root(q, 2)
    assert lambda_bracket_is_root(QQ.scalar(-1), 2)
    assert lambda_bracket(QQ.scalar(2), 3) == QQ.scalar(7)
    # q = 1 is never a root: [m](1) = m
    assert not any(lambda_bracket_is_root(QQ.one(), m) for m in range(2, 8))


# ---------- linear algebra ----------

int_matrix = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


def _m(rows):
    return ExactMatrix(QQ, rows)


@settings(max_examples=80, deadline=None)
@given(int_matrix)
def test_rank_and_kernel_against_sympy(rows):
    m = _m(rows)
    sm = sympy.Matrix(rows)
    assert rank(m) == sm.rank()
    k = kernel(m)
    assert k.dim == m.cols - sm.rank()
    for v in k.vectors():
        assert all(x == 0 for x in m.apply(v))
    red, piv = rref(m)
    sred, spiv = sm.rref()
    assert tuple(piv) == tuple(spiv)
    assert red.to_strings() == [[str(sympy.nsimplify(x)) for x in sred.row(i)] for i in range(sm.rows)]


@settings(max_examples=60, deadline=None)
@given(int_matrix, st.data())
def test_solve_right(rows, data):
    m = _m(rows)
    x = [[data.draw(st.integers(-2, 2))] for _ in range(m.cols)]
    t = m @ _m(x)
    sol = solve_right(m, t)
    assert sol is not None and m @ sol == t


def test_solve_right_inconsistent():
    m = _m([[1, 1], [2, 2]])
    assert solve_right(m, _m([[1], [3]])) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.data())
def test_subspace_dimension_formula(n, data):
    vec = st.lists(st.integers(-2, 2), min_size=n, max_size=n)
    u = Subspace(QQ, n, data.draw(st.lists(vec, max_size=4)))
    w = Subspace(QQ, n, data.draw(st.lists(vec, max_size=4)))
    assert (u + w).dim + u.intersect(w).dim == u.dim + w.dim
    assert u.intersect(w).is_subspace_of(u)
    assert u.annihilator().dim == n - u.dim
    for b in u.vectors():
        assert u.contains(b)
        assert all(x == 0 for x in u.reduce(b))


def test_preimage_and_image():
    l = _m([[1, 0, 0], [0, 1, 0]])
    w = Subspace(QQ, 2, [[1, 0]])
    pre = preimage(l, w)
    assert pre.dim == 2
    assert pre.contains([QQ.scalar(5), QQ.zero(), QQ.scalar(7)])
    assert Subspace.full(QQ, 3).image(l).dim == 2


def test_largest_invariant_subspace():
    # shift operator e1 -> e2 -> e3 -> 0; invariant subspaces are span{e_k..e_3}
    t = _m([[0, 0, 0], [1, 0, 0], [0, 1, 0]])
    u = Subspace(QQ, 3, [[1, 0, 0], [0, 0, 1]])
    inv = largest_invariant_subspace([t], u)
    assert inv == Subspace(QQ, 3, [[0, 0, 1]])
    assert largest_invariant_subspace([t], Subspace.full(QQ, 3)).dim == 3
    closure = invariant_closure([t], [[1, 0, 0]], QQ, 3)
    assert closure.dim == 3


def test_kron_shape_and_values():
    a = _m([[1, 2], [3, 4]])
    i = ExactMatrix.identity(QQ, 2)
    k = kron(a, i)
    assert k.shape == (4, 4)
    assert k[0, 2] == QQ.scalar(2) and k[1, 3] == QQ.scalar(2) and k[0, 1] == QQ.zero()
