"""Commutation rules, twisted partial derivatives and coordinate differentials.

A rule is given by n matrices of polynomials: ``matrices[m-1][j-1][k-1]`` is
A(x^m)^j_k, so that x^m dx^j = sum_k dx^k A(x^m)^j_k.  Grids returned by
:func:`apply_hom` use the same layout, ``grid[i-1][k-1] = A(p)^i_k``, and
compose by A(uv)^i_k = sum_l A(u)^l_k A(v)^i_l.

In the homogeneous case A(x^i)^j_k = alpha^{ij}_{kl} x^l and the rule carries
the twist alpha, entry [(k, l), (i, j)].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .exactmath import FieldDescriptor, FieldElement
from .freealg import NcPoly, Word, format_poly
from .twistlab import Twist, manin_twist, pair_index

DEFAULT_REWRITE_BUDGET = 10_000

Grid = tuple  # tuple[tuple[NcPoly, ...], ...]


class RewriteBudgetExceeded(RuntimeError):
    """Normalization needed more commutation moves than allowed."""


@dataclass(frozen=True, eq=False)
class CommRule:
    n: int
    field: FieldDescriptor
    matrices: tuple
    alpha: Optional[Twist] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.matrices) != self.n:
            raise ValueError("need one matrix per generator")
        for mat in self.matrices:
            if len(mat) != self.n or any(len(row) != self.n for row in mat):
                raise ValueError("rule matrices must be n x n")

    @property
    def homogeneous(self) -> bool:
        return self.alpha is not None

    def entry(self, m: int, j: int, k: int) -> NcPoly:
        """A(x^m)^j_k."""
        return self.matrices[m - 1][j - 1][k - 1]

    @classmethod
    def from_matrices(cls, n: int, field: FieldDescriptor, matrices: Sequence) -> "CommRule":
        """General rule; detected as homogeneous when every entry is linear."""
        mats = tuple(tuple(tuple(_as_poly(e, n, field) for e in row) for row in mat) for mat in matrices)
        linear = all(
            all(len(w) == 1 for w in e.terms) for mat in mats for row in mat for e in row
        )
        alpha = None
        if linear:
            entries = {}
            for i in range(1, n + 1):
                for j in range(1, n + 1):
                    for k in range(1, n + 1):
                        for (l,), c in mats[i - 1][j - 1][k - 1].terms.items():
                            entries[(i, j, k, l)] = c
            alpha = Twist.from_tensor(field, n, entries)
        return cls(n, field, mats, alpha)

    def __str__(self):
        lines = []
        for i in range(1, self.n + 1):
            for j in range(1, self.n + 1):
                parts = []
                for k in range(1, self.n + 1):
                    e = self.entry(i, j, k)
                    if e:
                        parts.append(f"dx{k}*({format_poly(e)})")
                lines.append(f"x{i}*dx{j} = " + (" + ".join(parts) if parts else "0"))
        return "\n".join(lines)


def _as_poly(e, n, field) -> NcPoly:
    if isinstance(e, NcPoly):
        if e.n != n or e.field != field:
            raise ValueError("rule entry over the wrong algebra")
        return e
    return NcPoly.scalar(n, field, e)


def rule_from_twist(alpha: Twist) -> CommRule:
    """Homogeneous rule x^i dx^j = alpha^{ij}_{kl} dx^k x^l."""
    n, fld = alpha.n, alpha.field
    mats = []
    for i in range(1, n + 1):
        mat = []
        for j in range(1, n + 1):
            row = []
            for k in range(1, n + 1):
                terms = {}
                for l in range(1, n + 1):
                    c = alpha.matrix[pair_index(k, l, n), pair_index(i, j, n)]
                    if c:
                        terms[(l,)] = c
                row.append(NcPoly._raw(n, fld, terms))
            mat.append(tuple(row))
        mats.append(tuple(mat))
    return CommRule(n, fld, tuple(mats), alpha)


def diagonal_rule(alpha: Sequence[Sequence], field: FieldDescriptor) -> CommRule:
    """x^j dx^i = alpha^{ij} dx^i x^j; ``alpha[i-1][j-1]`` is alpha^{ij}."""
    return rule_from_twist(manin_twist(alpha, field))


# ---------- the homomorphism A ----------

def identity_grid(n: int, field: FieldDescriptor) -> Grid:
    one, zero = NcPoly.one(n, field), NcPoly.zero(n, field)
    return tuple(tuple(one if i == k else zero for k in range(n)) for i in range(n))


def compose(p: Grid, q: Grid) -> Grid:
    """The grid of A(uv) from those of A(u) and A(v)."""
    n = len(p)
    zero = NcPoly.zero(p[0][0].n, p[0][0].field)
    out = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = None
            for l in range(n):
                a, b = p[l][k], q[i][l]
                if a and b:
                    t = a * b
                    acc = t if acc is None else acc + t
            row.append(acc if acc is not None else zero)
        out.append(tuple(row))
    return tuple(out)


def _word_hom(rule: CommRule, word: Word) -> Grid:
    cache = rule._cache.setdefault("hom", {})
    g = cache.get(word)
    if g is None:
        if not word:
            g = identity_grid(rule.n, rule.field)
        elif len(word) == 1:
            g = rule.matrices[word[0] - 1]
        else:
            g = compose(rule.matrices[word[0] - 1], _word_hom(rule, word[1:]))
        cache[word] = g
    return g


def apply_hom(rule: CommRule, p: NcPoly) -> Grid:
    """A(p) as an n x n grid, grid[i-1][k-1] = A(p)^i_k."""
    _check_poly(rule, p)
    n = rule.n
    acc = [[NcPoly.zero(n, rule.field) for _ in range(n)] for _ in range(n)]
    for w, c in p.terms.items():
        g = _word_hom(rule, w)
        for i in range(n):
            for k in range(n):
                if g[i][k]:
                    acc[i][k] = acc[i][k] + g[i][k].scale(c)
    return tuple(tuple(r) for r in acc)


def hom_entry(rule: CommRule, p: NcPoly, i: int, k: int) -> NcPoly:
    """A(p)^i_k."""
    acc = NcPoly.zero(rule.n, rule.field)
    for w, c in p.terms.items():
        e = _word_hom(rule, w)[i - 1][k - 1]
        if e:
            acc = acc + e.scale(c)
    return acc


def _check_poly(rule: CommRule, p: NcPoly):
    if p.n != rule.n:
        raise ValueError(f"polynomial has {p.n} generators, rule has {rule.n}")
    if p.field != rule.field:
        raise ValueError(f"polynomial over {p.field}, rule over {rule.field}")


# ---------- partial derivatives ----------

def word_derivatives(rule: CommRule, word: Word) -> tuple:
    """(D_1(w), ..., D_n(w)) by D_k(x^j w) = delta^j_k w + A(x^j)^i_k D_i(w)."""
    cache = rule._cache.setdefault("der", {})
    out = cache.get(word)
    if out is not None:
        return out
    n, fld = rule.n, rule.field
    if not word:
        zero = NcPoly.zero(n, fld)
        out = (zero,) * n
    else:
        j, rest = word[0], word[1:]
        inner = word_derivatives(rule, rest)
        mat = rule.matrices[j - 1]
        res = []
        for k in range(1, n + 1):
            acc = NcPoly.monomial(n, fld, rest) if k == j else NcPoly.zero(n, fld)
            for i in range(1, n + 1):
                a, d = mat[i - 1][k - 1], inner[i - 1]
                if a and d:
                    acc = acc + a * d
            res.append(acc)
        out = tuple(res)
    cache[word] = out
    return out


def partial_derivatives(rule: CommRule, p: NcPoly) -> tuple:
    _check_poly(rule, p)
    n = rule.n
    acc = [NcPoly.zero(n, rule.field) for _ in range(n)]
    for w, c in p.terms.items():
        for k, d in enumerate(word_derivatives(rule, w)):
            if d:
                acc[k] = acc[k] + d.scale(c)
    return tuple(acc)


def partial_derivative(rule: CommRule, k: int, p: NcPoly) -> NcPoly:
    if not 1 <= k <= rule.n:
        raise ValueError(f"derivative index {k} out of range 1..{rule.n}")
    return partial_derivatives(rule, p)[k - 1]


# ---------- one-forms ----------

@dataclass(frozen=True, eq=False)
class OneForm:
    """sum_k dx^k * coeffs[k-1], right-coefficient normal form."""

    n: int
    field: FieldDescriptor
    coeffs: tuple

    @classmethod
    def zero(cls, n: int, field: FieldDescriptor) -> "OneForm":
        return cls(n, field, (NcPoly.zero(n, field),) * n)

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.n, self.field, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.n, self.field, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __eq__(self, other):
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self):
        parts = [f"dx{k}*({format_poly(c)})" for k, c in enumerate(self.coeffs, 1) if c]
        return " + ".join(parts) if parts else "0"


def differential(rule: CommRule, p: NcPoly) -> OneForm:
    """d(p) = sum_k dx^k D_k(p)."""
    return OneForm(rule.n, rule.field, partial_derivatives(rule, p))


@dataclass(frozen=True)
class MixedTerm:
    """left * dx^index * right, with arbitrary polynomials on both sides."""

    left: NcPoly
    index: int
    right: NcPoly


class _Budget:
    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self):
        self.used += 1
        if self.used > self.limit:
            raise RewriteBudgetExceeded(
                f"normalization exceeded the rewrite budget of {self.limit} moves"
            )


def _push_right(rule: CommRule, states: dict, budget: _Budget) -> list:
    """Rewrite x^j dx^i -> dx^k A(x^j)^i_k until no generator is left of dx.

    ``states`` maps (left word, dx index) to the right coefficient.  Each move
    strips the last letter of a left word, so longer words are processed first
    and their contributions merge before being moved again.
    """
    n = rule.n
    out = [NcPoly.zero(n, rule.field) for _ in range(n)]
    by_len: dict[int, dict] = {}
    for (w, i), r in states.items():
        by_len.setdefault(len(w), {})
        bucket = by_len[len(w)]
        bucket[(w, i)] = bucket[(w, i)] + r if (w, i) in bucket else r
    top = max(by_len, default=0)
    for length in range(top, 0, -1):
        bucket = by_len.pop(length, {})
        below = by_len.setdefault(length - 1, {})
        for (w, i), r in bucket.items():
            if not r:
                continue
            budget.spend()
            prefix, j = w[:-1], w[-1]
            mat = rule.matrices[j - 1]
            for k in range(1, n + 1):
                a = mat[i - 1][k - 1]
                if a:
                    key = (prefix, k)
                    t = a * r
                    below[key] = below[key] + t if key in below else t
    for (w, i), r in by_len.get(0, {}).items():
        out[i - 1] = out[i - 1] + r
    return out


def normalize_right(rule: CommRule, mixed: Iterable[MixedTerm],
                    budget: int = DEFAULT_REWRITE_BUDGET) -> OneForm:
    """Bring sum left * dx^i * right into the form sum_k dx^k * c_k."""
    states: dict = {}
    for term in mixed:
        for w, c in term.left.terms.items():
            key = (w, term.index)
            r = term.right.scale(c)
            states[key] = states[key] + r if key in states else r
    return OneForm(rule.n, rule.field, tuple(_push_right(rule, states, _Budget(budget))))


def pass_through(rule: CommRule, poly: NcPoly, dx_word: Sequence[int],
                 budget: Optional["_Budget | int"] = None) -> dict:
    """poly * dx^{l_1} ... dx^{l_m} = sum_K dx^K * result[K]."""
    if budget is None:
        budget = _Budget(DEFAULT_REWRITE_BUDGET)
    elif isinstance(budget, int):
        budget = _Budget(budget)
    current = {(): poly}
    for l in dx_word:
        nxt: dict = {}
        for prefix, c in current.items():
            states = {(w, l): NcPoly.scalar(rule.n, rule.field, a) for w, a in c.terms.items()}
            coeffs = _push_right(rule, states, budget)
            for k, r in enumerate(coeffs, 1):
                if r:
                    key = prefix + (k,)
                    nxt[key] = nxt[key] + r if key in nxt else r
        current = nxt
    return current


# ---------- universal differential ----------

@dataclass(frozen=True)
class AssociativityReport:
    holds: bool
    violations: tuple  # (i, j, k) triples, 1-based
    constant_violations: tuple
    relations: tuple  # x^i x^j - C^{ij}_k x^k - D^{ij}


def universal_rule(c: Sequence, dq: Sequence, field: FieldDescriptor) -> tuple[CommRule, AssociativityReport]:
    """Rule A(x^i)^j_k = C^{ij}_k - delta^i_k x^j of the multiplication table
    x^i x^j = C^{ij}_k x^k + D^{ij}.

    ``c[i-1][j-1][k-1]`` is C^{ij}_k and ``dq[i-1][j-1]`` is D^{ij}.
    """
    n = len(dq)
    C = [[[field.scalar(c[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]
    D = [[field.scalar(dq[i][j]) for j in range(n)] for i in range(n)]
    mats = []
    for i in range(n):
        mat = []
        for j in range(n):
            row = []
            for k in range(n):
                e = NcPoly.scalar(n, field, C[i][j][k])
                if i == k:
                    e = e - NcPoly.generator(n, field, j + 1)
                row.append(e)
            mat.append(tuple(row))
        mats.append(tuple(mat))
    rule = CommRule.from_matrices(n, field, mats)

    zero = field.zero()
    violations, constant_violations = [], []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                bad = False
                for m in range(n):
                    lhs = sum((C[i][j][r] * C[r][k][m] for r in range(n)), zero)
                    rhs = sum((C[j][k][r] * C[i][r][m] for r in range(n)), zero)
                    if k == m:
                        lhs = lhs + D[i][j]
                    if i == m:
                        rhs = rhs + D[j][k]
                    if lhs != rhs:
                        bad = True
                if bad:
                    violations.append((i + 1, j + 1, k + 1))
                lhs0 = sum((C[i][j][r] * D[r][k] for r in range(n)), zero)
                rhs0 = sum((C[j][k][r] * D[i][r] for r in range(n)), zero)
                if lhs0 != rhs0:
                    constant_violations.append((i + 1, j + 1, k + 1))
    relations = []
    for i in range(n):
        for j in range(n):
            f = NcPoly.monomial(n, field, (i + 1, j + 1))
            for k in range(n):
                if C[i][j][k]:
                    f = f - NcPoly.monomial(n, field, (k + 1,), C[i][j][k])
            f = f - NcPoly.scalar(n, field, D[i][j])
            relations.append(f)
    report = AssociativityReport(
        holds=not violations,
        violations=tuple(violations),
        constant_violations=tuple(constant_violations),
        relations=tuple(relations),
    )
    return rule, report
