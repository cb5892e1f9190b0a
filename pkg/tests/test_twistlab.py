from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nccalc.calculus import partial_derivatives, rule_from_twist
from nccalc.exactmath import QQ, ExactMatrix, rank
from nccalc.freealg import coords_of, parse
from nccalc.optimal import check_consistency, optimal_ideal
from nccalc.twistlab import (
    Twist,
    TripleOperator,
    generalized_ybe_solve,
    hecke_check,
    hlavaty_build,
    is_gybe_witness,
    is_manin_form,
    lift12,
    lift23,
    linear_condition_check,
    manin_twist,
    minus_one_in_spectrum,
    quadratic_relations,
    relation_space,
    remark34_check,
    wz_ybe_check,
    ybe_check,
)

from .strategies import random_twist

E2 = Twist.identity(QQ, 2)
P2 = Twist.flip(QQ, 2)
QP = manin_twist([[1, 2], [Fraction(1, 2), 1]])


def _basis3(a, b, c, n=2):
    v = [QQ.zero()] * n ** 3
    v[(a - 1) * n * n + (b - 1) * n + (c - 1)] = QQ.one()
    return tuple(v)


def test_lift_examples():
    assert lift12(E2).matrix == ExactMatrix.identity(QQ, 8)
    assert lift12(P2).matrix.apply(_basis3(1, 2, 1)) == _basis3(2, 1, 1)
    assert lift23(P2).matrix.apply(_basis3(1, 2, 1)) == _basis3(1, 1, 2)


@settings(max_examples=30, deadline=None)
@given(random_twist(2), random_twist(2))
def test_lift_coherence(s, t):
    assert lift12(s) @ lift12(t) == lift12(s @ t)
    assert lift23(s) @ lift23(t) == lift23(s @ t)


def test_ybe_examples():
    assert ybe_check(E2) and ybe_check(P2) and ybe_check(-P2) and ybe_check(QP)
    assert ybe_check(Twist.flip(QQ, 3))
    assert not ybe_check(Twist(2, ExactMatrix(QQ, [[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [1, 0, 0, 1]])))


@settings(max_examples=30, deadline=None)
@given(random_twist(2))
def test_wz_trivial_cases(a):
    assert wz_ybe_check(a, E2)
    if ybe_check(a):
        assert wz_ybe_check(a, a)


def test_gybe_examples():
    z = generalized_ybe_solve(P2, E2)
    assert z is not None and z.is_zero()
    for a in (P2, -P2, QP):
        z = generalized_ybe_solve(a, a)
        assert z is not None and is_gybe_witness(a, a, z)
        assert is_gybe_witness(a, a, lift12(a) @ lift23(a))


def test_gybe_unsolvable_found_by_search():
    rng = random.Random(7)
    found = None
    for _ in range(200):
        a = Twist(2, ExactMatrix(QQ, [[rng.randint(-2, 2) for _ in range(4)] for _ in range(4)]))
        b = Twist(2, ExactMatrix(QQ, [[rng.randint(-2, 2) for _ in range(4)] for _ in range(4)]))
        if generalized_ybe_solve(a, b) is None:
            found = (a, b)
            break
    assert found is not None
    a, b = found
    emb = (E2 - b)
    lhs = (lift12(a) @ lift23(a) @ lift12(emb)).matrix
    left = lift23(emb).matrix
    assert rank(left.hstack(lhs)) > rank(left)


@settings(max_examples=40, deadline=None)
@given(random_twist(2), random_twist(2))
def test_gybe_solver_is_sound(a, b):
    z = generalized_ybe_solve(a, b)
    emb = E2 - b
    lhs = (lift12(a) @ lift23(a) @ lift12(emb)).matrix
    left = lift23(emb).matrix
    assert (z is not None) == (rank(left.hstack(lhs)) == rank(left))
    if z is not None:
        assert is_gybe_witness(a, b, z)


def test_linear_condition_examples():
    assert linear_condition_check(P2, P2)
    assert all(linear_condition_check(a, E2) for a in (P2, QP, -E2))


@pytest.mark.parametrize("alpha", list(itertools.product((-1, 1, 2, Fraction(1, 2)), repeat=4)))
def test_linear_condition_diagonal_formula(alpha):
    a11, a12, a21, a22 = alpha
    ag = [[a11, a12], [a21, a22]]
    for beta in itertools.product((-1, 1, 2, Fraction(1, 2)), repeat=2):
        bg = [[beta[0], a12], [a21, beta[1]]]
        expected = (a12 * a21 == 1 and all((ag[i][i] + 1) * (1 - bg[i][i]) == 0 for i in range(2)))
        assert linear_condition_check(manin_twist(ag), manin_twist(bg)) == expected
    # mismatched off-diagonal entries never pass
    bg = [[1, a12 + 1], [a21, 1]]
    assert not linear_condition_check(manin_twist(ag), manin_twist(bg))


@settings(max_examples=40, deadline=None)
@given(random_twist(2), random_twist(2))
def test_linear_condition_is_derivative_vanishing(a, b):
    rule = rule_from_twist(a)
    vanish = all(not d for f in quadratic_relations(b) for d in partial_derivatives(rule, f))
    assert linear_condition_check(a, b) == vanish


def test_hecke_examples():
    assert hecke_check(P2, 1)
    assert hecke_check(E2, 1) and not hecke_check(E2, 2)
    assert all(hecke_check(-E2, mu) for mu in (1, 2, -3))
    assert hecke_check(QP, 1)
    with pytest.raises(ZeroDivisionError):
        hecke_check(P2, 0)


@pytest.mark.parametrize("mu", [1, 2, -1, Fraction(1, 3)])
def test_hecke_composite(mu):
    for a in (P2, QP, -P2):
        if ybe_check(a) and hecke_check(a, mu):
            b = a.scale(mu)
            assert generalized_ybe_solve(a, b) is not None
            assert linear_condition_check(a, b)


def test_hecke_composite_with_nontrivial_mu():
    # n = 1, A = 1/2: the Hecke equation holds exactly for mu = 2
    h = Twist(1, ExactMatrix(QQ, [[Fraction(1, 2)]]))
    assert hecke_check(h, 2)
    assert generalized_ybe_solve(h, h.scale(2)) is not None and linear_condition_check(h, h.scale(2))


def test_hlavaty_examples():
    rep = hlavaty_build(P2, [1, -1])
    assert rep.b == P2 and rep.ok
    rep = hlavaty_build(-E2, [0])
    assert rep.b == E2 and rep.c1_ok and rep.c2_ok
    rep = hlavaty_build(P2, [2])
    assert not rep.annihilates and not rep.preconditions_ok
    assert isinstance(rep.witness, TripleOperator)


def test_manin_examples():
    assert manin_twist([[1, 1], [1, 1]]) == P2
    assert manin_twist([[-1, -1], [-1, -1]]) == -P2
    assert is_manin_form(QP) and not is_manin_form(E2 + P2)
    assert QP.coefficient(1, 2, 2, 1) == QQ.parse("1/2")
    assert QP.coefficient(2, 1, 1, 2) == QQ.scalar(2)


def test_quadratic_relation_examples():
    assert all(not f for f in quadratic_relations(E2))
    assert relation_space(P2).dim == 1
    span = relation_space(QP)
    target = parse("x1*x2 - 1/2*x2*x1", 2, QQ)
    assert span.dim == 1 and span.contains(coords_of(target, 2))


def _diag_twist(rng, n):
    vals = [-2, -1, Fraction(1, 2), 1, 2, 3]
    return manin_twist([[rng.choice(vals) for _ in range(n)] for _ in range(n)])


def test_three_twist_identity_diagonal_and_counterexample():
    rng = random.Random(34)
    for n in (2, 3):
        for _ in range(10):
            a, b, c = (_diag_twist(rng, n) for _ in range(3))
            assert remark34_check(a, b, c)
    assert remark34_check(P2, P2, P2)
    found = False
    for _ in range(20):
        a, b, c = (Twist(2, ExactMatrix(QQ, [[rng.randint(-1, 1) for _ in range(4)] for _ in range(4)]))
                   for _ in range(3))
        if not remark34_check(a, b, c):
            found = True
            break
    assert found


@settings(max_examples=25, deadline=None)
@given(random_twist(2, values=(-1, 0, 1)), random_twist(2, values=(-1, 0, 1)))
def test_wb_inside_optimal_ideal_when_consistent(a, b):
    if generalized_ybe_solve(a, b) is not None and linear_condition_check(a, b):
        ideal = optimal_ideal(rule_from_twist(a), 2)
        assert relation_space(b).is_subspace_of(ideal.component(2))
        assert check_consistency(rule_from_twist(a), quadratic_relations(b)).consistent


def test_minus_one_in_spectrum():
    assert minus_one_in_spectrum(P2)
    assert not minus_one_in_spectrum(E2)
    assert minus_one_in_spectrum(QP)


@pytest.mark.parametrize("a", [P2, -P2, QP, E2, -E2], ids=["flip", "superflip", "quantum-plane", "E", "-E"])
def test_wb_inside_optimal_ideal_structured(a):
    for b in (a, E2):
        assert generalized_ybe_solve(a, b) is not None
        if linear_condition_check(a, b):
            ideal = optimal_ideal(rule_from_twist(a), 3)
            assert relation_space(b).is_subspace_of(ideal.component(2))
