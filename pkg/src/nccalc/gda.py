"""Higher differential forms: the relation ideal J_A, Lambda_A(dV), and d.

A form is sum_I dx^I * v_I with dx-words I on the left and polynomial right
coefficients.  For a homogeneous rule the ideal J_A generated by
dx^i dx^j + alpha^{ij}_{kl} dx^k dx^l is bigraded by (grade m, coefficient
degree d).  Its (m, d) component is spanned by

    dx^P * (u * rel * dx^Q) * w,   |P| + 2 + |Q| = m,  |u| + |w| = d,

where u is moved to the right of the dx letters with the commutation rule.
Coordinates of the (m, d) component: word_index(I) * n^d + word_index(w).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from ._parallel import pmap
from .calculus import CommRule, DEFAULT_REWRITE_BUDGET, _Budget, pass_through, partial_derivatives
from .exactmath import ExactMatrix, Subspace, solve_right
from .freealg import NcPoly, format_poly, index_word, word_index, words_of_degree
from .optimal import NonHomogeneousError, check_cap, graded_ideal_components
from .twistlab import Twist, TripleOperator, lift12, lift23, ybe_check

AMBIGUITY_FLAGS = (
    "lambda relations use alpha^{ij}_{kl}; the displayed Lambda_A formula writes alpha^{ji}_{kl}",
    "graded Leibniz rule implemented in standard form d(ab) = da*b + (-1)^m a*db",
)


class DiffForm:
    """Finite sum of dx^I * v_I (dx-word I, polynomial v_I)."""

    __slots__ = ("n", "field", "terms")

    def __init__(self, n: int, field, terms: Mapping[Sequence[int], NcPoly] = ()):
        clean: dict = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for word, v in items:
            word = tuple(word)
            if any(not 1 <= i <= n for i in word):
                raise ValueError(f"dx index out of range 1..{n}")
            if not isinstance(v, NcPoly):
                v = NcPoly.scalar(n, field, v)
            if v.n != n or v.field != field:
                raise ValueError("coefficient over the wrong algebra")
            if word in clean:
                v = clean[word] + v
            if v:
                clean[word] = v
            else:
                clean.pop(word, None)
        self.n, self.field, self.terms = n, field, clean

    @classmethod
    def function(cls, v: NcPoly) -> "DiffForm":
        return cls(v.n, v.field, {(): v})

    @classmethod
    def dx(cls, n: int, field, word: Sequence[int], coeff: Optional[NcPoly] = None) -> "DiffForm":
        return cls(n, field, {tuple(word): coeff if coeff is not None else NcPoly.one(n, field)})

    @classmethod
    def zero(cls, n: int, field) -> "DiffForm":
        return cls(n, field, {})

    def grades(self) -> set:
        return {len(w) for w in self.terms}

    @property
    def grade(self) -> int:
        """The grade of a homogeneous form; -1 for zero."""
        g = self.grades()
        if len(g) > 1:
            raise ValueError("form mixes grades")
        return g.pop() if g else -1

    def __add__(self, other: "DiffForm") -> "DiffForm":
        terms = dict(self.terms)
        for w, v in other.terms.items():
            terms[w] = terms[w] + v if w in terms else v
        return DiffForm(self.n, self.field, terms)

    def __neg__(self):
        return DiffForm(self.n, self.field, {w: -v for w, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "DiffForm":
        return DiffForm(self.n, self.field, {w: v.scale(c) for w, v in self.terms.items()})

    def right_mul(self, p: NcPoly) -> "DiffForm":
        return DiffForm(self.n, self.field, {w: v * p for w, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DiffForm):
            return NotImplemented
        return self.n == other.n and self.field == other.field and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), w)):
            v = format_poly(self.terms[w])
            if not w:
                parts.append(f"({v})")
            else:
                parts.append("*".join(f"dx{i}" for i in w) + f"*({v})")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffForm({str(self)!r})"


# ---------- Lambda_A(dV) ----------

def _twist(rule: CommRule) -> Twist:
    if not rule.homogeneous:
        raise NonHomogeneousError("this operation needs a homogeneous rule")
    return rule.alpha


def lambda_relations(rule: CommRule) -> list[NcPoly]:
    """The n^2 relations dx^i dx^j + alpha^{ij}_{kl} dx^k dx^l as degree-2
    polynomials on the dx alphabet, in (i, j) order."""
    a = _twist(rule)
    n, fld = rule.n, rule.field
    e_plus_a = (Twist.identity(fld, n) + a).matrix
    out = []
    for col in range(n * n):
        terms = {}
        for row in range(n * n):
            c = e_plus_a[row, col]
            if c:
                terms[divmod(row, n)] = c
        out.append(NcPoly(n, fld, {(k + 1, l + 1): c for (k, l), c in terms.items()}))
    return out


def lambda_dims(rule: CommRule, max_grade: int) -> list[int]:
    """dim Lambda^m_A(dV) for m = 0..max_grade."""
    rels = lambda_relations(rule)
    comps = graded_ideal_components(rels, max_grade, n=rule.n, field=rule.field)
    return [rule.n ** m - comps[m].dim for m in range(max_grade + 1)]


def freeness_check(rule_or_twist) -> Optional[TripleOperator]:
    """Y with (E + A)_12 Y = A12 A23 A12 - A23 A12 A23, or None."""
    a = rule_or_twist if isinstance(rule_or_twist, Twist) else _twist(rule_or_twist)
    n, fld = a.n, a.field
    if ybe_check(a):
        return TripleOperator(n, ExactMatrix.zeros(fld, n ** 3, n ** 3))
    a12, a23 = lift12(a), lift23(a)
    rhs = a12 @ a23 @ a12 - a23 @ a12 @ a23
    y = solve_right(lift12(Twist.identity(fld, n) + a).matrix, rhs.matrix)
    return None if y is None else TripleOperator(n, y)


# ---------- the bigraded relation ideal ----------

def _coord(form_word, coeff_word, n: int, d: int) -> int:
    return word_index(form_word, n) * n ** d + word_index(coeff_word, n)


def relation_component(rule: CommRule, m: int, d: int,
                       budget: int = DEFAULT_REWRITE_BUDGET) -> Subspace:
    """J_A in grade m and coefficient degree d, as a subspace of n^m * n^d coordinates."""
    n, fld = rule.n, rule.field
    cache = rule._cache.setdefault("gda_J", {})
    if (m, d) in cache:
        return cache[(m, d)]
    check_cap(n, m + d)
    dim = n ** (m + d)
    if m < 2:
        sub = Subspace.zero(fld, dim)
        cache[(m, d)] = sub
        return sub
    rels = lambda_relations(rule)
    tracker = _Budget(budget)
    zero = fld.zero()

    def spanning(job):
        p, e = job
        q = m - 2 - p
        vecs = []
        for u in words_of_degree(n, e):
            upoly = NcPoly.monomial(n, fld, u)
            for rel in rels:
                # u * rel * dx^Q with every dx-word of rel extended by Q
                for qword in words_of_degree(n, q):
                    moved: dict = {}
                    for rw, c in rel.terms.items():
                        for k, r in pass_through(rule, upoly, rw + qword, tracker).items():
                            t = r.scale(c)
                            moved[k] = moved[k] + t if k in moved else t
                    moved = {k: v for k, v in moved.items() if v}
                    if not moved:
                        continue
                    for pword in words_of_degree(n, p):
                        for w in words_of_degree(n, d - e):
                            vec = [zero] * dim
                            for k, r in moved.items():
                                for rw2, c in r.terms.items():
                                    vec[_coord(pword + k, rw2 + w, n, d)] += c
                            vecs.append(vec)
        return vecs

    jobs = [(p, e) for p in range(m - 1) for e in range(d + 1)]
    vectors = [v for chunk in pmap(spanning, jobs) for v in chunk]
    sub = Subspace._from_vectors(fld, dim, vectors)
    cache[(m, d)] = sub
    return sub


def _bicomponents(form: DiffForm) -> dict:
    out: dict = {}
    for word, v in form.terms.items():
        for cw, c in v.terms.items():
            out.setdefault((len(word), len(cw)), []).append((word, cw, c))
    return out


def reduce_form(rule: CommRule, form: DiffForm, budget: int = DEFAULT_REWRITE_BUDGET) -> DiffForm:
    """Canonical representative of form modulo J_A (homogeneous rules)."""
    _twist(rule)
    n, fld = rule.n, rule.field
    terms: dict = {}
    for (m, d), entries in _bicomponents(form).items():
        if m < 2:
            for word, cw, c in entries:
                terms.setdefault(word, {})[cw] = c
            continue
        sub = relation_component(rule, m, d, budget)
        vec = [fld.zero()] * (n ** (m + d))
        for word, cw, c in entries:
            vec[_coord(word, cw, n, d)] = c
        red = sub.reduce(vec)
        for idx, c in enumerate(red):
            if c:
                fi, ci = divmod(idx, n ** d)
                word = index_word(fi, n, m)
                terms.setdefault(word, {})[index_word(ci, n, d)] = c
    return DiffForm(n, fld, {w: NcPoly._raw(n, fld, t) for w, t in terms.items()})


def is_zero_mod_relations(rule: CommRule, form: DiffForm) -> bool:
    return reduce_form(rule, form).is_zero()


# ---------- d and products ----------

def _maybe_reduce(rule: CommRule, form: DiffForm, reduce: bool) -> DiffForm:
    if not reduce:
        return form
    if not rule.homogeneous:
        raise NonHomogeneousError("reduction modulo J_A needs a homogeneous rule; pass reduce=False")
    return reduce_form(rule, form)


def gda_d(rule: CommRule, form: DiffForm, reduce: bool = True) -> DiffForm:
    """d(dx^I * v) = (-1)^m dx^I * sum_k dx^k * D_k(v), m = |I|."""
    terms: dict = {}
    for word, v in form.terms.items():
        sign = -1 if len(word) % 2 else 1
        for k, dk in enumerate(partial_derivatives(rule, v), 1):
            if dk:
                key = word + (k,)
                t = dk.scale(sign)
                terms[key] = terms[key] + t if key in terms else t
    return _maybe_reduce(rule, DiffForm(rule.n, rule.field, terms), reduce)


def gda_multiply(rule: CommRule, a: DiffForm, b: DiffForm, reduce: bool = True,
                 budget: int = DEFAULT_REWRITE_BUDGET) -> DiffForm:
    """(dx^I u)(dx^K w) = dx^I * (u dx^K) * w, with u moved right by the rule."""
    tracker = _Budget(budget)
    terms: dict = {}
    for iw, u in a.terms.items():
        for kw, w in b.terms.items():
            for lw, r in pass_through(rule, u, kw, tracker).items():
                key = iw + lw
                t = r * w
                terms[key] = terms[key] + t if key in terms else t
    return _maybe_reduce(rule, DiffForm(rule.n, rule.field, terms), reduce)


def check_d_squared(rule: CommRule, max_degree: int,
                    budget: int = DEFAULT_REWRITE_BUDGET) -> dict[int, bool]:
    """{s: d(d(v)) reduces to zero for every word v of degree s}, s = 0..max_degree."""
    _twist(rule)
    n, fld = rule.n, rule.field
    out = {}
    for s in range(max_degree + 1):
        def ok(word):
            v = DiffForm.function(NcPoly.monomial(n, fld, word))
            return reduce_form(rule, gda_d(rule, gda_d(rule, v, reduce=False), reduce=False), budget).is_zero()
        out[s] = all(pmap(ok, words_of_degree(n, s)))
    return out


def form_dimension(rule: CommRule, m: int, d: int) -> int:
    """dim of (T(dV) (x) R)/J_A in grade m, free coefficient degree d."""
    return rule.n ** (m + d) - relation_component(rule, m, d).dim


# ---------- report ----------

@dataclass(frozen=True)
class GdaReport:
    lambda_dims: tuple
    freeness_witness: Optional[TripleOperator]
    d_squared_ok: dict
    ambiguity_flags: tuple = AMBIGUITY_FLAGS

    @property
    def free(self) -> bool:
        return self.freeness_witness is not None

    @property
    def d_squared_holds(self) -> bool:
        return all(self.d_squared_ok.values())


def gda_report(rule: CommRule, max_grade: int = 3, max_degree: int = 4) -> GdaReport:
    return GdaReport(
        lambda_dims=tuple(lambda_dims(rule, max_grade)),
        freeness_witness=freeness_check(rule),
        d_squared_ok=check_d_squared(rule, max_degree),
    )
