"""Graded ideals, consistency of relations with a rule, and the optimal ideal I(A).

Every homogeneous component of degree s is handled in the word coordinates of
:mod:`nccalc.freealg` (ambient dimension n^s).  For a homogeneous rule the
maps f -> A(f)^i_k preserve degree and D_k lowers it by one, which makes the
inductive construction of I(A) a sequence of exact kernel computations.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

from ._parallel import pmap
from .calculus import CommRule, _word_hom, hom_entry, partial_derivatives, word_derivatives
from .exactmath import (
    ExactMatrix,
    FieldDescriptor,
    FieldElement,
    Subspace,
    invariant_closure,
    kernel,
    largest_invariant_subspace,
    solve_right,
)
from .freealg import NcPoly, coords_of, from_coords, word_index, words_of_degree

DEFAULT_MAX_DEGREE = 6
AMBIENT_CAP = 20_000


class DimensionCapExceeded(RuntimeError):
    """A homogeneous component would exceed the supported ambient dimension."""


class NonHomogeneousError(ValueError):
    pass


def check_cap(n: int, s: int, cap: int = AMBIENT_CAP) -> None:
    if n ** s > cap:
        raise DimensionCapExceeded(
            f"degree {s} component has ambient dimension {n ** s} > cap {cap}; lower the degree"
        )


# ---------- graded ideals generated by homogeneous polynomials ----------

def _shift_left(vec: Sequence, i: int, n: int, d: int, zero) -> list:
    """Coordinates of x^i * v for v of degree d."""
    out = [zero] * (n ** (d + 1))
    base = (i - 1) * n ** d
    for idx, c in enumerate(vec):
        if c:
            out[base + idx] = c
    return out


def _shift_right(vec: Sequence, i: int, n: int, d: int, zero) -> list:
    out = [zero] * (n ** (d + 1))
    for idx, c in enumerate(vec):
        if c:
            out[idx * n + (i - 1)] = c
    return out


def grow_ideal(prev: Subspace, extra: Sequence[Sequence], n: int, d: int) -> Subspace:
    """J_d = span(extra) + sum_i (x^i J_{d-1} + J_{d-1} x^i)."""
    zero = prev.field.zero()
    vectors = [list(v) for v in extra]
    for b in prev.vectors():
        for i in range(1, n + 1):
            vectors.append(_shift_left(b, i, n, d - 1, zero))
            vectors.append(_shift_right(b, i, n, d - 1, zero))
    return Subspace._from_vectors(prev.field, n ** d, vectors)


def graded_ideal_components(generators: Sequence[NcPoly], max_degree: int, *,
                            n: Optional[int] = None,
                            field: Optional[FieldDescriptor] = None) -> list[Subspace]:
    """[J_0, ..., J_max] for the two-sided ideal generated by homogeneous polynomials."""
    gens = [g for g in generators if g]
    if gens:
        n, field = gens[0].n, gens[0].field
    if n is None or field is None:
        raise ValueError("n and field are required for an empty generator list")
    for g in gens:
        if not g.is_homogeneous():
            raise NonHomogeneousError(f"generator {g} is not homogeneous")
    by_degree: dict[int, list] = {}
    for g in gens:
        by_degree.setdefault(g.degree, []).append(coords_of(g, g.degree))
    comps = [Subspace._from_vectors(field, 1, by_degree.get(0, []))]
    for d in range(1, max_degree + 1):
        check_cap(n, d)
        comps.append(grow_ideal(comps[-1], by_degree.get(d, []), n, d))
    return comps


def graded_ideal_component(generators: Sequence[NcPoly], s: int, *,
                           n: Optional[int] = None,
                           field: Optional[FieldDescriptor] = None) -> Subspace:
    """Degree-s slice of the ideal generated by homogeneous polynomials."""
    return graded_ideal_components(generators, s, n=n, field=field)[s]


# ---------- linear maps on homogeneous components ----------

def hom_maps(rule: CommRule, s: int) -> dict[tuple[int, int], ExactMatrix]:
    """{(i, k): matrix of f -> A(f)^i_k on degree s}; homogeneous rules only."""
    if not rule.homogeneous:
        raise NonHomogeneousError("A-maps on homogeneous components need a homogeneous rule")
    cache = rule._cache.setdefault("hom_maps", {})
    if s in cache:
        return cache[s]
    n, fld = rule.n, rule.field
    check_cap(n, s)
    dim = n ** s
    zero = fld.zero()
    words = words_of_degree(n, s)
    grids = pmap(lambda w: _word_hom(rule, w), words)
    out = {}
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            rows = [[zero] * dim for _ in range(dim)]
            for col, g in enumerate(grids):
                for w, c in g[i - 1][k - 1].terms.items():
                    rows[word_index(w, n)][col] = c
            out[(i, k)] = ExactMatrix._raw(fld, rows, dim)
    cache[s] = out
    return out


def derivative_maps(rule: CommRule, s: int) -> list[ExactMatrix]:
    """[D_1, ..., D_n] as n^(s-1) x n^s matrices; homogeneous rules only."""
    if not rule.homogeneous:
        raise NonHomogeneousError("derivative maps on components need a homogeneous rule")
    cache = rule._cache.setdefault("der_maps", {})
    if s in cache:
        return cache[s]
    n, fld = rule.n, rule.field
    check_cap(n, s)
    zero = fld.zero()
    words = words_of_degree(n, s)
    ders = pmap(lambda w: word_derivatives(rule, w), words)
    out = []
    for k in range(n):
        rows = [[zero] * len(words) for _ in range(n ** (s - 1))]
        for col, d in enumerate(ders):
            for w, c in d[k].terms.items():
                rows[word_index(w, n)][col] = c
        out.append(ExactMatrix._raw(fld, rows, len(words)))
    cache[s] = out
    return out


def derivative_preimage(rule: CommRule, s: int, lower: Subspace) -> Subspace:
    """U_s = {m of degree s : D_k(m) in lower for all k}."""
    q = lower.annihilator()
    if q.dim == 0:
        return Subspace.full(rule.field, rule.n ** s)
    rows = []
    for dk in derivative_maps(rule, s):
        rows.extend((q.basis @ dk).entries)
    return kernel(ExactMatrix._raw(rule.field, rows, rule.n ** s))


# ---------- the optimal ideal ----------

@dataclass(frozen=True, eq=False)
class IdealTruncation:
    """Homogeneous components I_1..I_max of an ideal (I_0 = 0 implied)."""

    n: int
    field: FieldDescriptor
    max_degree: int
    components: tuple  # Subspace for degrees 1..max_degree
    u_components: Optional[tuple] = field(default=None, repr=False)

    def component(self, s: int) -> Subspace:
        if s == 0:
            return Subspace.zero(self.field, 1)
        if not 1 <= s <= self.max_degree:
            raise ValueError(f"degree {s} outside the truncation 0..{self.max_degree}")
        return self.components[s - 1]

    def basis_polys(self, s: int) -> list[NcPoly]:
        return [from_coords(self.n, self.field, s, v) for v in self.component(s).vectors()]

    def contains(self, p: NcPoly) -> bool:
        if p.degree > self.max_degree:
            raise ValueError("polynomial degree exceeds the truncation")
        return all(self.component(s).contains(coords_of(p, s)) for s in range(0, p.degree + 1))

    def normal_form(self, p: NcPoly) -> NcPoly:
        """Canonical representative of p modulo the ideal, degree by degree."""
        out = NcPoly.zero(self.n, self.field)
        for s in range(0, p.degree + 1):
            out = out + from_coords(self.n, self.field, s, self.component(s).reduce(coords_of(p, s)))
        return out

    @classmethod
    def zero(cls, n: int, field: FieldDescriptor, max_degree: int) -> "IdealTruncation":
        return cls(n, field, max_degree, tuple(Subspace.zero(field, n ** s) for s in range(1, max_degree + 1)))

    @classmethod
    def from_generators(cls, generators: Sequence[NcPoly], max_degree: int, *,
                        n: Optional[int] = None, field: Optional[FieldDescriptor] = None
                        ) -> "IdealTruncation":
        comps = graded_ideal_components(generators, max_degree, n=n, field=field)
        f = comps[0].field
        return cls(n if n is not None else generators[0].n, f, max_degree, tuple(comps[1:]))


def optimal_ideal(rule: CommRule, max_degree: int = DEFAULT_MAX_DEGREE) -> IdealTruncation:
    """I(A) up to max_degree: I_1 = 0, I_s = largest A-invariant subspace of U_s."""
    if not rule.homogeneous:
        raise NonHomogeneousError("the optimal ideal is only constructed for homogeneous rules")
    if max_degree < 2:
        raise ValueError("max_degree must be at least 2")
    n, fld = rule.n, rule.field
    for s in range(1, max_degree + 1):
        check_cap(n, s)
    comps = [Subspace.zero(fld, n)]
    us = [Subspace.zero(fld, n)]
    for s in range(2, max_degree + 1):
        u = derivative_preimage(rule, s, comps[-1])
        maps = list(hom_maps(rule, s).values())
        comps.append(largest_invariant_subspace(maps, u))
        us.append(u)
    return IdealTruncation(n, fld, max_degree, tuple(comps), tuple(us))


def hilbert_dims(ideal: IdealTruncation) -> list[int]:
    """dim of the quotient in degrees 0..max: 1, n - dim I_1, n^2 - dim I_2, ..."""
    return [1] + [ideal.n ** s - ideal.component(s).dim for s in range(1, ideal.max_degree + 1)]


def nondegeneracy_check(rule: CommRule, ideal: IdealTruncation) -> dict[int, bool]:
    """{s: U_s == I_s}, U_s computed from the given I_{s-1}."""
    out = {}
    for s in range(1, ideal.max_degree + 1):
        u = derivative_preimage(rule, s, ideal.component(s - 1))
        out[s] = u == ideal.component(s)
    return out


# ---------- certificates ----------

@dataclass(frozen=True)
class CertificateReport:
    closure: dict  # s -> x I_s + I_s x inside I_{s+1}
    invariance: dict  # s -> A(I_s)^i_k inside I_s
    derivatives: dict  # s -> D_k(I_s) inside I_{s-1}
    maximality: dict = field(default_factory=dict)  # s -> spot check passed

    @property
    def ok(self) -> bool:
        return all(self.closure.values()) and all(self.invariance.values()) and \
            all(self.derivatives.values()) and all(self.maximality.values())


def closure_certificate(ideal: IdealTruncation) -> dict[int, bool]:
    n = ideal.n
    zero = ideal.field.zero()
    out = {}
    for s in range(1, ideal.max_degree):
        nxt = ideal.component(s + 1)
        ok = True
        for b in ideal.component(s).vectors():
            for i in range(1, n + 1):
                if not (nxt.contains(_shift_left(b, i, n, s, zero)) and nxt.contains(_shift_right(b, i, n, s, zero))):
                    ok = False
                    break
            if not ok:
                break
        out[s] = ok
    return out


def invariance_certificate(rule: CommRule, ideal: IdealTruncation) -> dict[int, bool]:
    out = {}
    for s in range(1, ideal.max_degree + 1):
        comp = ideal.component(s)
        maps = hom_maps(rule, s).values()
        out[s] = all(comp.contains(t.apply(b)) for t in maps for b in comp.vectors())
    return out


def derivative_certificate(rule: CommRule, ideal: IdealTruncation) -> dict[int, bool]:
    out = {}
    for s in range(1, ideal.max_degree + 1):
        comp, lower = ideal.component(s), ideal.component(s - 1)
        if s == 1:
            out[s] = all(not any(d.apply(b)) for d in _degree_one_derivatives(rule) for b in comp.vectors())
            continue
        out[s] = all(lower.contains(d.apply(b)) for d in derivative_maps(rule, s) for b in comp.vectors())
    return out


def _degree_one_derivatives(rule: CommRule) -> list[ExactMatrix]:
    # D_k(x^i) = delta^i_k, as 1 x n rows
    fld = rule.field
    return [ExactMatrix._raw(fld, [[fld.one() if i == k else fld.zero() for i in range(rule.n)]], rule.n)
            for k in range(rule.n)]


def maximality_certificate(rule: CommRule, ideal: IdealTruncation, seed: int = 0,
                           samples: int = 3) -> dict[int, bool]:
    """Spot check: vectors of U_s outside I_s generate A-orbits leaving U_s."""
    if ideal.u_components is None:
        raise ValueError("maximality needs the U_s recorded by optimal_ideal")
    rng = random.Random(seed)
    out = {}
    for s in range(2, ideal.max_degree + 1):
        u, comp = ideal.u_components[s - 1], ideal.component(s)
        if u.dim == comp.dim:
            out[s] = True
            continue
        maps = list(hom_maps(rule, s).values())
        ok = True
        for _ in range(samples):
            coeffs = [rng.randint(-2, 2) for _ in range(u.dim)]
            v = [rule.field.zero()] * u.ambient_dim
            for c, b in zip(coeffs, u.vectors()):
                if c:
                    v = [x + c * y for x, y in zip(v, b)]
            if comp.contains(v):
                continue
            closure = invariant_closure(maps, [v], rule.field, u.ambient_dim)
            if closure.is_subspace_of(u):
                ok = False
                break
        out[s] = ok
    return out


def certify(rule: CommRule, ideal: IdealTruncation, seed: int = 0) -> CertificateReport:
    return CertificateReport(
        closure=closure_certificate(ideal),
        invariance=invariance_certificate(rule, ideal),
        derivatives=derivative_certificate(rule, ideal),
        maximality=maximality_certificate(rule, ideal, seed) if ideal.u_components is not None else {},
    )


# ---------- consistency of a relation set with a rule ----------

@dataclass(frozen=True)
class Failure:
    condition: str  # "C1", "C2" or "proper"
    relation: int  # 1-based generator index
    indices: tuple  # (i, k) for C1, (k,) for C2
    residual: NcPoly


@dataclass(frozen=True)
class ConsistencyReport:
    c1_holds: dict  # (a, i, k) -> bool, a 1-based
    c2_holds: dict  # (a, k) -> bool
    gamma: Optional[dict]  # (i, b, k, a) -> gamma^{ib}_{ka}
    failures: tuple
    exactness: str  # "exact" or "truncated"
    truncation_degree: Optional[int]
    route: str  # "graded", "certificate" or "truncated"

    @property
    def consistent(self) -> bool:
        return not self.failures

    @property
    def c1_ok(self) -> bool:
        return all(self.c1_holds.values())

    @property
    def c2_ok(self) -> bool:
        return all(self.c2_holds.values())


def check_consistency(rule: CommRule, generators: Sequence[NcPoly],
                      truncation: int = DEFAULT_MAX_DEGREE) -> ConsistencyReport:
    """Decide (C1) A(I)^i_k in I and (C2) D_k(I) in I for I = <generators>.

    Both conditions only need checking on generators.  For homogeneous
    generators the ideal is graded and membership is decided exactly in each
    component.  Otherwise membership is searched in the span of u f w up to
    the truncation degree: a hit is a proof, a miss is reported as a
    truncated failure.
    """
    gens = list(generators)
    for g in gens:
        if g.n != rule.n or g.field != rule.field:
            raise ValueError("relations must live over the rule's algebra")
    nonzero = [g for g in gens if g]
    if all(g.is_homogeneous() for g in nonzero):
        return _check_graded(rule, gens)
    return _check_filtered(rule, gens, truncation)


def _targets(rule: CommRule, f: NcPoly):
    n = rule.n
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            yield "C1", (i, k), hom_entry(rule, f, i, k)
    for k, d in enumerate(partial_derivatives(rule, f), 1):
        yield "C2", (k,), d


def _check_graded(rule: CommRule, gens: list[NcPoly]) -> ConsistencyReport:
    n, fld = rule.n, rule.field
    targets = [(a, cond, idx, r) for a, f in enumerate(gens, 1) if f for cond, idx, r in _targets(rule, f)]
    top = max([f.degree for f in gens if f] + [r.degree for *_, r in targets] + [0])
    comps = graded_ideal_components(gens, top, n=n, field=fld)
    c1, c2, failures = {}, {}, []
    if comps[0].dim:
        failures.append(Failure("proper", 0, (), NcPoly.one(n, fld)))
    for a, f in enumerate(gens, 1):
        if not f:
            for i in range(1, n + 1):
                for k in range(1, n + 1):
                    c1[(a, i, k)] = True
                c2[(a, i)] = True
    for a, cond, idx, r in targets:
        residual = NcPoly.zero(n, fld)
        for s in range(0, r.degree + 1):
            residual = residual + from_coords(n, fld, s, comps[s].reduce(coords_of(r, s)))
        ok = not residual
        (c1 if cond == "C1" else c2)[(a,) + idx] = ok
        if not ok:
            failures.append(Failure(cond, a, idx, residual))
    gamma = _gamma(rule, gens) if all(c1.values()) else None
    return ConsistencyReport(c1, c2, gamma, tuple(failures), "exact", None, "graded")


def _gamma(rule: CommRule, gens: list[NcPoly]) -> Optional[dict]:
    """Scalars with A(f_a)^i_k = sum_b gamma^{ib}_{ka} f_b, when all f_a share a degree."""
    nonzero = [(b, f) for b, f in enumerate(gens, 1) if f]
    if not nonzero or len({f.degree for _, f in nonzero}) != 1 or not rule.homogeneous:
        return None
    n, fld = rule.n, rule.field
    d = nonzero[0][1].degree
    fmat = ExactMatrix._raw(fld, [list(r) for r in zip(*(coords_of(f, d) for _, f in nonzero))], len(nonzero))
    keys, cols = [], []
    for a, f in nonzero:
        for i in range(1, n + 1):
            for k in range(1, n + 1):
                keys.append((i, k, a))
                cols.append(coords_of(hom_entry(rule, f, i, k), d))
    tmat = ExactMatrix._raw(fld, [list(r) for r in zip(*cols)], len(cols))
    sol = solve_right(fmat, tmat)
    if sol is None:
        return None
    gamma = {}
    for col, (i, k, a) in enumerate(keys):
        for row, (b, _) in enumerate(nonzero):
            c = sol[row, col]
            if c:
                gamma[(i, b, k, a)] = c
    return gamma


# filtered (non-homogeneous) case

def _filtered_offsets(n: int, top: int) -> list[int]:
    """Block starts per degree, highest degree first, total size last.

    Putting high degrees first makes reduced residuals prefer low degree.
    """
    offs, acc = [0] * (top + 1), 0
    for s in range(top, -1, -1):
        offs[s] = acc
        acc += n ** s
    offs.append(acc)
    return offs


def _filtered_vector(p: NcPoly, offs: list[int]) -> list:
    zero = p.field.zero()
    v = [zero] * offs[-1]
    for w, c in p.terms.items():
        v[offs[len(w)] + word_index(w, p.n)] = c
    return v


def _common_zero(gens: list[NcPoly]) -> Optional[tuple]:
    """A point of F^n where every generator vanishes, from a small search box."""
    n, fld = gens[0].n, gens[0].field
    values = (0, 1, -1, 2, -2) if n <= 3 else (0, 1, -1)
    for point in product(values, repeat=n):
        pt = [fld.scalar(v) for v in point]
        if all(_evaluate(g, pt) == 0 for g in gens):
            return tuple(point)
    return None


def _evaluate(p: NcPoly, point: list[FieldElement]) -> FieldElement:
    total = p.field.zero()
    for w, c in p.terms.items():
        term = c
        for letter in w:
            term = term * point[letter - 1]
        total = total + term
    return total


def _check_filtered(rule: CommRule, gens: list[NcPoly], truncation: int) -> ConsistencyReport:
    n, fld = rule.n, rule.field
    nonzero = [g for g in gens if g]
    top_gen = max(g.degree for g in nonzero)
    if truncation < top_gen:
        raise ValueError("truncation must be at least the largest generator degree")
    offs = _filtered_offsets(n, truncation)
    check_cap(n, truncation)
    # level e spans u f w with |u| + |w| + deg f = e
    levels: dict[int, list[NcPoly]] = {}
    for g in nonzero:
        levels.setdefault(g.degree, []).append(g)
    span = Subspace._from_vectors(fld, offs[-1], [])
    prev_level: list[NcPoly] = []
    letters = [NcPoly.generator(n, fld, i) for i in range(1, n + 1)]
    for e in range(0, truncation + 1):
        level = list(levels.get(e, []))
        for p in prev_level:
            for x in letters:
                level.append(x * p)
                level.append(p * x)
        vecs = [_filtered_vector(p, offs) for p in level]
        basis = Subspace._from_vectors(fld, offs[-1], vecs)
        span = span + basis
        prev_level = [_from_filtered(v, n, fld, offs) for v in basis.vectors()]
    c1, c2, failures = {}, {}, []
    one = _filtered_vector(NcPoly.one(n, fld), offs)
    proper_certified = _common_zero(nonzero) is not None
    if span.contains(one):
        failures.append(Failure("proper", 0, (), NcPoly.one(n, fld)))
    certified = proper_certified
    for a, f in enumerate(gens, 1):
        if not f:
            continue
        for cond, idx, r in _targets(rule, f):
            if r.degree > truncation:
                ok = False
                residual = r
            else:
                red = span.reduce(_filtered_vector(r, offs))
                residual = _from_filtered(red, n, fld, offs)
                ok = not residual
            (c1 if cond == "C1" else c2)[(a,) + idx] = ok
            if not ok:
                failures.append(Failure(cond, a, idx, residual))
                certified = False
    exact = certified and not failures
    return ConsistencyReport(
        c1, c2, _gamma(rule, gens) if exact else None, tuple(failures),
        "exact" if exact else "truncated", None if exact else truncation,
        "certificate" if exact else "truncated",
    )


def _from_filtered(v: Sequence, n: int, fld: FieldDescriptor, offs: list[int]) -> NcPoly:
    p = NcPoly.zero(n, fld)
    for s in range(len(offs) - 1):
        seg = v[offs[s]:offs[s] + n ** s]
        if any(seg):
            p = p + from_coords(n, fld, s, seg)
    return p
