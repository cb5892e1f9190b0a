from __future__ import annotations

import random
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nccalc.calculus import rule_from_twist
from nccalc.exactmath import QQ, ExactMatrix
from nccalc.freealg import NcPoly, parse
from nccalc.gda import (
    DiffForm,
    check_d_squared,
    form_dimension,
    freeness_check,
    gda_d,
    gda_multiply,
    gda_report,
    lambda_dims,
    lambda_relations,
    reduce_form,
)
from nccalc.optimal import NonHomogeneousError
from nccalc.calculus import universal_rule
from nccalc.twistlab import Twist, lift12, lift23, manin_twist, minus_one_in_spectrum, ybe_check

CLASSICAL = rule_from_twist(Twist.flip(QQ, 2))
GRASSMANN = rule_from_twist(-Twist.flip(QQ, 2))
QPLANE = rule_from_twist(manin_twist([[1, 2], [Fraction(1, 2), 1]]))
ZERO = rule_from_twist(Twist.zero(QQ, 2))
YBE_RULES = {"classical": CLASSICAL, "grassmann": GRASSMANN, "quantum-plane": QPLANE}


def P(text, n=2):
    return parse(text, n, QQ)


def form(terms, n=2):
    return DiffForm(n, QQ, {w: P(v, n) for w, v in terms.items()})


def test_lambda_relation_examples():
    assert [str(r) for r in lambda_relations(CLASSICAL)] == ["2*x1^2", "x1*x2 + x2*x1", "x1*x2 + x2*x1", "2*x2^2"]
    assert [str(r) for r in lambda_relations(GRASSMANN)] == ["0", "x1*x2 - x2*x1", "-x1*x2 + x2*x1", "0"]
    assert [str(r) for r in lambda_relations(ZERO)] == ["x1^2", "x1*x2", "x2*x1", "x2^2"]


def test_lambda_dims_examples():
    assert lambda_dims(CLASSICAL, 3) == [1, 2, 1, 0]
    assert lambda_dims(rule_from_twist(Twist.flip(QQ, 3)), 4) == [1, 3, 3, 1, 0]
    assert lambda_dims(ZERO, 3) == [1, 2, 0, 0]
    assert lambda_dims(QPLANE, 3) == [1, 2, 1, 0]
    assert lambda_dims(GRASSMANN, 4) == [1, 2, 3, 4, 5]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_classical_limit_binomials(n):
    rule = rule_from_twist(Twist.flip(QQ, n))
    assert lambda_dims(rule, n + 1) == [comb(n, m) for m in range(n + 2)]


def test_freeness_examples():
    for rule in YBE_RULES.values():
        y = freeness_check(rule)
        assert y is not None and y.is_zero()
    assert freeness_check(Twist.flip(QQ, 3)).is_zero()


def test_freeness_invertible_case():
    rng = random.Random(5)
    tried = 0
    for _ in range(200):
        a = Twist(2, ExactMatrix(QQ, [[rng.randint(-1, 1) for _ in range(4)] for _ in range(4)]))
        if ybe_check(a) or minus_one_in_spectrum(a):
            continue
        y = freeness_check(a)
        assert y is not None
        a12, a23 = lift12(a), lift23(a)
        assert lift12(Twist.identity(QQ, 2) + a) @ y == a12 @ a23 @ a12 - a23 @ a12 @ a23
        tried += 1
    assert tried > 10


def test_gda_d_examples():
    x1 = DiffForm.function(P("x1"))
    assert gda_d(CLASSICAL, x1) == DiffForm.dx(2, QQ, (1,))
    got = gda_d(CLASSICAL, form({(1,): "x2"}))
    expected = reduce_form(CLASSICAL, DiffForm(2, QQ, {(1, 2): P("-1")}))
    assert got == expected
    assert reduce_form(CLASSICAL, got + DiffForm(2, QQ, {(1, 2): P("1")})).is_zero()
    assert gda_d(CLASSICAL, DiffForm.dx(2, QQ, (1, 2))).is_zero()


def test_gda_multiply_examples():
    assert gda_multiply(CLASSICAL, form({(1,): "x2"}), DiffForm.function(P("x1"))) == form({(1,): "x2*x1"})
    assert gda_multiply(CLASSICAL, DiffForm.function(P("x1")), DiffForm.dx(2, QQ, (2,))) == form({(2,): "x1"})
    dx1 = DiffForm.dx(2, QQ, (1,))
    assert gda_multiply(CLASSICAL, dx1, dx1).is_zero()


def test_d_squared_examples():
    for rule in (CLASSICAL, GRASSMANN, QPLANE):
        report = check_d_squared(rule, 4)
        assert set(report) == {0, 1, 2, 3, 4} and all(report.values())
    v = DiffForm.function(P("x1*x2"))
    assert gda_d(CLASSICAL, gda_d(CLASSICAL, v)).is_zero()


@settings(max_examples=20, deadline=None)
@given(st.lists(st.sampled_from([-1, 0, 1]), min_size=16, max_size=16))
def test_d_squared_for_random_twists(entries):
    """d^2 = 0 holds for every homogeneous rule: D_l D_k v is killed by E + A."""
    a = Twist(2, ExactMatrix(QQ, [entries[4 * r:4 * r + 4] for r in range(4)]))
    assert all(check_d_squared(rule_from_twist(a), 3).values())


def test_non_homogeneous_reduction_rejected():
    rule, _ = universal_rule([[[1]]], [[0]], QQ)
    v = DiffForm.function(parse("x1^2", 1, QQ))
    with pytest.raises(NonHomogeneousError):
        gda_d(rule, v)
    assert gda_d(rule, v, reduce=False).grade == 1


def _coeffs(n, max_len):
    word = st.lists(st.integers(1, n), max_size=max_len).map(tuple)
    return st.dictionaries(word, st.integers(-2, 2).filter(bool), min_size=1, max_size=2).map(
        lambda t: NcPoly(n, QQ, t))


@st.composite
def forms(draw, max_grade=1, max_len=1):
    grade = draw(st.integers(0, max_grade))
    words = st.lists(st.integers(1, 2), min_size=grade, max_size=grade).map(tuple)
    terms = draw(st.dictionaries(words, _coeffs(2, max_len), min_size=1, max_size=2))
    return DiffForm(2, QQ, terms)


rule_names = st.sampled_from(sorted(YBE_RULES))


@settings(max_examples=30, deadline=None)
@given(rule_names, forms(), forms())
def test_graded_leibniz(name, a, b):
    rule = YBE_RULES[name]
    sign = -1 if a.grade % 2 else 1
    lhs = gda_d(rule, gda_multiply(rule, a, b, reduce=False))
    rhs = gda_multiply(rule, gda_d(rule, a, reduce=False), b) + \
        gda_multiply(rule, a, gda_d(rule, b, reduce=False)).scale(sign)
    assert lhs == reduce_form(rule, rhs)


@settings(max_examples=30, deadline=None)
@given(rule_names, forms(), forms(), forms())
def test_multiplication_associative(name, a, b, c):
    rule = YBE_RULES[name]
    left = gda_multiply(rule, gda_multiply(rule, a, b, reduce=False), c)
    right = gda_multiply(rule, a, gda_multiply(rule, b, c, reduce=False))
    assert left == right


@pytest.mark.parametrize("name", sorted(YBE_RULES))
def test_freeness_dimension_count(name):
    rule = YBE_RULES[name]
    lam = lambda_dims(rule, 3)
    for m in range(4):
        for d in range(3):
            assert form_dimension(rule, m, d) == lam[m] * 2 ** d


def test_report_fields():
    rep = gda_report(CLASSICAL, 3, 2)
    assert rep.lambda_dims == (1, 2, 1, 0)
    assert rep.free and rep.d_squared_holds
    assert rep.ambiguity_flags


def test_diffform_basics():
    f = form({(1,): "x2", (): "x1"})
    assert f.grades() == {0, 1}
    with pytest.raises(ValueError):
        _ = f.grade
    assert (f - f).is_zero()
    assert str(form({(1, 2): "x1"})) == "dx1*dx2*(x1)"
    with pytest.raises(ValueError):
        DiffForm(2, QQ, {(3,): P("1")})
