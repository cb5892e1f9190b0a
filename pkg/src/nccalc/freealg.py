"""Words and noncommutative polynomials in the free algebra F<x1, ..., xn>.

A word is a tuple of 1-based generator indices; ``()`` is the unit monomial.
Within a fixed degree s, words are enumerated lexicographically and the word
(i_1, ..., i_s) sits at coordinate sum_t (i_t - 1) * n^(s - t).  Every matrix
built downstream uses this enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .exactmath import FieldDescriptor, FieldElement, FieldMismatchError, parse_expression

Word = tuple


def word_index(word: Sequence[int], n: int) -> int:
    idx = 0
    for letter in word:
        idx = idx * n + (letter - 1)
    return idx


def index_word(idx: int, n: int, s: int) -> Word:
    letters = []
    for _ in range(s):
        idx, r = divmod(idx, n)
        letters.append(r + 1)
    return tuple(reversed(letters))


def words_of_degree(n: int, s: int) -> list[Word]:
    return list(product(range(1, n + 1), repeat=s))


def _word_key(word: Word):
    return (len(word), word)


class NcPoly:
    """Immutable polynomial: a finite map from words to nonzero coefficients."""

    __slots__ = ("n", "field", "terms")

    def __init__(self, n: int, field: FieldDescriptor, terms: Mapping[Sequence[int], object] = ()):
        clean = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for word, c in items:
            word = tuple(word)
            for letter in word:
                if not 1 <= letter <= n:
                    raise ValueError(f"generator index {letter} out of range 1..{n}")
            c = field.scalar(c)
            if word in clean:
                c = clean[word] + c
            if c:
                clean[word] = c
            else:
                clean.pop(word, None)
        self.n = n
        self.field = field
        self.terms = clean

    @classmethod
    def _raw(cls, n, field, terms: dict) -> "NcPoly":
        p = cls.__new__(cls)
        p.n = n
        p.field = field
        p.terms = terms
        return p

    # constructors
    @classmethod
    def zero(cls, n: int, field: FieldDescriptor) -> "NcPoly":
        return cls._raw(n, field, {})

    @classmethod
    def scalar(cls, n: int, field: FieldDescriptor, c) -> "NcPoly":
        c = field.scalar(c)
        return cls._raw(n, field, {(): c} if c else {})

    @classmethod
    def one(cls, n: int, field: FieldDescriptor) -> "NcPoly":
        return cls.scalar(n, field, 1)

    @classmethod
    def generator(cls, n: int, field: FieldDescriptor, i: int) -> "NcPoly":
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} out of range 1..{n}")
        return cls._raw(n, field, {(i,): field.one()})

    @classmethod
    def monomial(cls, n: int, field: FieldDescriptor, word: Sequence[int], c=1) -> "NcPoly":
        return cls(n, field, {tuple(word): c})

    # inspection
    def __iter__(self) -> Iterator[tuple[Word, FieldElement]]:
        """Terms in canonical degree-then-lexicographic order."""
        for w in sorted(self.terms, key=_word_key):
            yield w, self.terms[w]

    def coefficient(self, word: Sequence[int]) -> FieldElement:
        return self.terms.get(tuple(word), self.field.zero())

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    @property
    def degree(self) -> int:
        """Maximal word length; -1 for the zero polynomial."""
        return max((len(w) for w in self.terms), default=-1)

    @property
    def min_degree(self) -> int:
        return min((len(w) for w in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({len(w) for w in self.terms}) <= 1

    def constant_term(self) -> FieldElement:
        return self.coefficient(())

    def component(self, s: int) -> "NcPoly":
        return NcPoly._raw(self.n, self.field, {w: c for w, c in self.terms.items() if len(w) == s})

    # arithmetic
    def _coerce(self, other) -> Optional["NcPoly"]:
        if isinstance(other, NcPoly):
            if other.n != self.n:
                raise ValueError(f"generator count mismatch: {self.n} vs {other.n}")
            if other.field != self.field:
                raise FieldMismatchError(f"cannot combine {self.field} and {other.field} polynomials")
            return other
        try:
            return NcPoly.scalar(self.n, self.field, other)
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for w, c in o.terms.items():
            s = terms.get(w)
            if s is None:
                terms[w] = c
            else:
                s = s + c
                if s:
                    terms[w] = s
                else:
                    del terms[w]
        return NcPoly._raw(self.n, self.field, terms)

    __radd__ = __add__

    def __neg__(self):
        return NcPoly._raw(self.n, self.field, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def scale(self, c) -> "NcPoly":
        c = self.field.scalar(c)
        if not c:
            return NcPoly.zero(self.n, self.field)
        return NcPoly._raw(self.n, self.field, {w: c * a for w, a in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (FieldElement, int, Fraction)):
            return self.scale(other)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return multiply(self, o)

    def __rmul__(self, other):
        # scalars are central
        if isinstance(other, (FieldElement, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = NcPoly.one(self.n, self.field)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, NcPoly):
            return self.n == other.n and self.field == other.field and self.terms == other.terms
        if isinstance(other, (int, FieldElement)):
            return self == NcPoly.scalar(self.n, self.field, other)
        return NotImplemented

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"NcPoly({format_poly(self)!r}, n={self.n})"


def multiply(p: NcPoly, q: NcPoly) -> NcPoly:
    """Concatenation product extended bilinearly."""
    if p.n != q.n:
        raise ValueError(f"generator count mismatch: {p.n} vs {q.n}")
    if p.field != q.field:
        raise FieldMismatchError(f"cannot combine {p.field} and {q.field} polynomials")
    terms: dict = {}
    for u, a in p.terms.items():
        for v, b in q.terms.items():
            w = u + v
            c = a * b
            s = terms.get(w)
            terms[w] = c if s is None else s + c
    return NcPoly._raw(p.n, p.field, {w: c for w, c in terms.items() if c})


# ---------- graded coordinates ----------

@dataclass(frozen=True)
class GradedVector:
    n: int
    degree: int
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.n ** self.degree:
            raise ValueError("coordinate count must be n^degree")


def homogeneous_component(p: NcPoly, s: int) -> GradedVector:
    if s < 0:
        raise ValueError("degree must be non-negative")
    z = p.field.zero()
    coords = [z] * (p.n ** s)
    for w, c in p.terms.items():
        if len(w) == s:
            coords[word_index(w, p.n)] = c
    return GradedVector(p.n, s, tuple(coords))


def coords_of(p: NcPoly, s: int) -> tuple:
    return homogeneous_component(p, s).coords


def embed(vec: GradedVector, field: FieldDescriptor) -> NcPoly:
    return from_coords(vec.n, field, vec.degree, vec.coords)


def from_coords(n: int, field: FieldDescriptor, s: int, coords: Sequence) -> NcPoly:
    terms = {}
    for idx, c in enumerate(coords):
        if c:
            terms[index_word(idx, n, s)] = field.scalar(c)
    return NcPoly._raw(n, field, terms)


# ---------- text ----------

def format_word(word: Word, symbol: str = "x") -> str:
    if not word:
        return "1"
    parts = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        run = j - i
        parts.append(f"{symbol}{word[i]}" + (f"^{run}" if run > 1 else ""))
        i = j
    return "*".join(parts)


def _split_sign(c: FieldElement) -> tuple[str, str]:
    """(sign, text of |c|) for coefficients with a single nonzero power."""
    text = str(c)
    if text.startswith("-"):
        return "-", text[1:]
    return "+", text


def format_poly(p: NcPoly, symbol: str = "x") -> str:
    """Canonical text, e.g. ``x1*x2 - 1/2*x2*x1``."""
    pieces = []
    for w, c in p:
        if c.is_simple():
            sign, body = _split_sign(c)
            if not w:
                text = body
            else:
                text = format_word(w, symbol) if body == "1" else f"{body}*{format_word(w, symbol)}"
        else:
            sign = "+"
            text = f"({c})" if not w else f"({c})*{format_word(w, symbol)}"
        pieces.append((sign, text))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, text in pieces[1:]:
        out += f" {sign} {text}"
    return out


def parse(text: str, n: int, field: FieldDescriptor) -> NcPoly:
    """Parse the polynomial grammar; products keep their written order."""
    return parse_expression(
        text,
        scalar=lambda c: NcPoly.scalar(n, field, c),
        zeta=None if field.is_rational else (lambda: NcPoly.scalar(n, field, field.zeta())),
        variable=lambda i: NcPoly.generator(n, field, i),
    )


def parse_many(texts: Iterable[str], n: int, field: FieldDescriptor) -> list[NcPoly]:
    return [parse(t, n, field) for t in texts]
