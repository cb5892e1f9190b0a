"""Problem specification files (TOML) for the batch front end.

Schema::

    relations = ["x1*x2 - x2*x1"]      # optional, top level

    [space]
    n = 2
    field = "Q"                       # or "cyclotomic:3"

    [rule]
    kind = "diagonal"                 # diagonal | homogeneous-tensor | general | universal
    alpha = [["1", "1"], ["1", "1"]]  # diagonal: alpha[i-1][j-1] = alpha^{ij}
    # homogeneous-tensor: entries = [[i, j, k, l, "value"], ...]
    # general:            matrices = [[["A(x1)^1_1", ...], ...], ...]
    # universal:          c = [[[C^{ij}_k]]], d = [[D^{ij}]]

    [options]
    max_degree = 6
    rewrite_budget = 10000
    seed = 0

    [twists]                          # optional, for the twist commands
    b = { kind = "diagonal", alpha = [...] }   # default: B = A
    c = { kind = "homogeneous-tensor", entries = [...] }
    mu = "1"
    hlavaty_g = ["1", "-1"]

Scalars may be integers or strings in the expression grammar (``"1/2"``,
``"1+z"``).  Validation errors carry the line of the offending key.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .calculus import AssociativityReport, CommRule, DEFAULT_REWRITE_BUDGET, rule_from_twist, universal_rule
from .exactmath import FieldDescriptor, FieldElement, FieldMismatchError, ParseError
from .freealg import NcPoly, parse
from .optimal import DEFAULT_MAX_DEGREE
from .twistlab import Twist, manin_twist

RULE_KINDS = ("homogeneous-tensor", "diagonal", "general", "universal")
TWIST_KINDS = ("homogeneous-tensor", "diagonal")
RULE_KEYS = {
    "diagonal": {"kind", "alpha"},
    "homogeneous-tensor": {"kind", "entries"},
    "general": {"kind", "matrices"},
    "universal": {"kind", "c", "d"},
}
DEFAULT_SEED = 0
DEFAULT_HLAVATY_G = ("1", "-1")


class SpecError(ValueError):
    """Malformed or invalid specification; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _locate(text: Optional[str], section: Optional[str], key: str) -> Optional[int]:
    """Line of ``key = ...`` inside ``[section]`` (top level when section is None);
    with an empty key, the line of the section header."""
    if not text:
        return None
    current = None
    fallback = None
    key_re = re.compile(rf"^\s*{re.escape(key)}\s*=") if key else None
    head_re = re.compile(r"^\s*\[+\s*([^\]]+?)\s*\]+")
    for lineno, line in enumerate(text.splitlines(), 1):
        m = head_re.match(line)
        if m:
            current = m.group(1)
            if key_re is None and current == section:
                return lineno
            continue
        if key_re is not None and key_re.match(line):
            if current == section:
                return lineno
            fallback = fallback or lineno
    return fallback


class _KeyProblem(ValueError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(message)


def _keyed(key: str, fn, *args):
    try:
        return fn(*args)
    except _KeyProblem:
        raise
    except (ValueError, ParseError, FieldMismatchError, TypeError) as exc:
        raise _KeyProblem(key, f"{key}: {exc}") from None


def _field_text(f: FieldDescriptor) -> str:
    return "Q" if f.is_rational else f"cyclotomic:{f.order}"


def parse_field(text: Any) -> FieldDescriptor:
    if not isinstance(text, str):
        raise ValueError("field must be a string such as 'Q' or 'cyclotomic:3'")
    t = text.strip().lower()
    if t in ("q", "qq", "rational"):
        return FieldDescriptor.rational()
    m = re.fullmatch(r"cyclotomic\s*:\s*(\d+)", t) or re.fullmatch(r"q\(zeta_(\d+)\)", t)
    if m:
        return FieldDescriptor.cyclotomic(int(m.group(1)))
    raise ValueError(f"unknown field {text!r}; use 'Q' or 'cyclotomic:<m>'")


def _scalar(fld: FieldDescriptor, value: Any) -> FieldElement:
    if isinstance(value, bool):
        raise ValueError("booleans are not field elements")
    if isinstance(value, int):
        return fld.scalar(value)
    if isinstance(value, str):
        return fld.parse(value)
    raise ValueError(f"expected an integer or a string scalar, got {type(value).__name__}")


def _scalar_text(fld: FieldDescriptor, value: Any) -> str:
    return str(_scalar(fld, value))


def _grid(value: Any, dims: tuple, what: str) -> list:
    """Check nested list shape."""
    if not dims:
        return value
    if not isinstance(value, list) or len(value) != dims[0]:
        raise ValueError(f"{what} must be a list of length {dims[0]}")
    return [_grid(v, dims[1:], what) for v in value]


def _map_grid(fn, value, depth):
    if depth == 0:
        return fn(value)
    return [_map_grid(fn, v, depth - 1) for v in value]


def _normalize_twist_payload(kind: str, payload: Mapping, n: int, fld: FieldDescriptor) -> dict:
    if kind == "diagonal":
        def alpha():
            grid = _grid(payload.get("alpha"), (n, n), "alpha")
            return _map_grid(lambda v: _scalar_text(fld, v), grid, 2)
        return {"kind": kind, "alpha": _keyed("alpha", alpha)}
    if kind == "homogeneous-tensor":
        return {"kind": kind, "entries": _keyed("entries", _tensor_entries, payload.get("entries"), n, fld)}
    raise _KeyProblem("kind", f"unknown kind {kind!r}; expected one of {', '.join(TWIST_KINDS)}")


def _tensor_entries(entries: Any, n: int, fld: FieldDescriptor) -> list:
    if not isinstance(entries, list):
        raise ValueError("entries must be a list of [i, j, k, l, value]")
    out = []
    for e in entries:
        if not isinstance(e, list) or len(e) != 5:
            raise ValueError("each entry must be [i, j, k, l, value]")
        idx = e[:4]
        if any(isinstance(i, bool) or not isinstance(i, int) or not 1 <= i <= n for i in idx):
            raise ValueError(f"tensor indices must be integers in 1..{n}")
        out.append([*idx, _scalar_text(fld, e[4])])
    return out


def twist_from_payload(payload: Mapping, n: int, fld: FieldDescriptor) -> Twist:
    if payload["kind"] == "diagonal":
        return manin_twist(_map_grid(lambda v: _scalar(fld, v), payload["alpha"], 2), fld)
    entries: dict = {}
    for i, j, k, l, v in payload["entries"]:
        key = (i, j, k, l)
        entries[key] = entries.get(key, fld.zero()) + _scalar(fld, v)
    return Twist.from_tensor(fld, n, entries)


@dataclass(frozen=True)
class Options:
    max_degree: int = DEFAULT_MAX_DEGREE
    rewrite_budget: int = DEFAULT_REWRITE_BUDGET
    seed: int = DEFAULT_SEED


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    field: FieldDescriptor
    rule: dict  # normalized payload including "kind"; scalars as canonical strings
    relations: tuple = ()
    options: Options = Options()
    twists: dict = field(default_factory=dict)

    @property
    def rule_kind(self) -> str:
        return self.rule["kind"]

    # construction
    @classmethod
    def from_mapping(cls, data: Mapping, text: Optional[str] = None) -> "ProblemSpec":
        def fail(msg, section, key):
            raise SpecError(msg, _locate(text, section, key))

        if not isinstance(data, Mapping):
            raise SpecError("specification must be a table")
        known = {"space", "rule", "relations", "options", "twists"}
        for k in data:
            if k not in known:
                fail(f"unknown top-level key {k!r}", None, k)
        space = data.get("space")
        if not isinstance(space, Mapping):
            raise SpecError("missing [space] table", _locate(text, "space", ""))
        for k in space:
            if k not in ("n", "field"):
                fail(f"unknown key {k!r} in [space]", "space", k)
        n = space.get("n")
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            fail("space.n must be a positive integer", "space", "n")
        try:
            fld = parse_field(space.get("field", "Q"))
        except ValueError as exc:
            fail(str(exc), "space", "field")

        rule = data.get("rule")
        if not isinstance(rule, Mapping):
            raise SpecError("missing [rule] table", _locate(text, "rule", ""))
        kind = rule.get("kind")
        if kind not in RULE_KINDS:
            fail(f"rule.kind must be one of {', '.join(RULE_KINDS)}", "rule", "kind")
        for k in rule:
            if k not in RULE_KEYS[kind]:
                fail(f"unknown key {k!r} for rule kind {kind!r}", "rule", k)
        try:
            payload = cls._normalize_rule(kind, rule, n, fld)
        except _KeyProblem as exc:
            fail(f"rule.{exc}", "rule", exc.key)

        rels = data.get("relations", [])
        if not isinstance(rels, list) or any(not isinstance(r, str) for r in rels):
            fail("relations must be a list of strings", None, "relations")
        canon = []
        for r in rels:
            try:
                canon.append(str(parse(r, n, fld)))
            except (ParseError, ValueError, FieldMismatchError) as exc:
                fail(f"relation {r!r}: {exc}", None, "relations")

        opts = data.get("options", {})
        if not isinstance(opts, Mapping):
            fail("options must be a table", None, "options")
        values = {}
        for key, default, low in (("max_degree", DEFAULT_MAX_DEGREE, 1),
                                  ("rewrite_budget", DEFAULT_REWRITE_BUDGET, 1),
                                  ("seed", DEFAULT_SEED, 0)):
            v = opts.get(key, default)
            if isinstance(v, bool) or not isinstance(v, int) or v < low:
                fail(f"options.{key} must be an integer >= {low}", "options", key)
            values[key] = v
        for k in opts:
            if k not in values:
                fail(f"unknown option {k!r}", "options", k)

        tw = data.get("twists", {})
        if not isinstance(tw, Mapping):
            fail("twists must be a table", None, "twists")
        twists: dict = {}
        for k, v in tw.items():
            try:
                if k in ("b", "c"):
                    if not isinstance(v, Mapping):
                        raise ValueError("must be a table with a kind")
                    twists[k] = _normalize_twist_payload(v.get("kind"), v, n, fld)
                elif k == "mu":
                    twists[k] = _scalar_text(fld, v)
                elif k == "hlavaty_g":
                    if not isinstance(v, list) or not v:
                        raise ValueError("must be a non-empty coefficient list")
                    twists[k] = [_scalar_text(fld, c) for c in v]
                else:
                    raise ValueError("unknown key")
            except (ValueError, ParseError, FieldMismatchError, TypeError) as exc:
                fail(f"twists.{k}: {exc}", "twists", k)
        return cls(n, fld, payload, tuple(canon), Options(**values), twists)

    @staticmethod
    def _normalize_rule(kind: str, rule: Mapping, n: int, fld: FieldDescriptor) -> dict:
        if kind in TWIST_KINDS:
            return _normalize_twist_payload(kind, rule, n, fld)
        if kind == "general":
            def mats():
                return _grid(rule.get("matrices"), (n, n, n), "matrices")

            def entry(v):
                if isinstance(v, int) and not isinstance(v, bool):
                    v = str(v)
                if not isinstance(v, str):
                    raise ValueError("matrix entries must be polynomial strings")
                return str(parse(v, n, fld))
            return {"kind": kind, "matrices": _keyed("matrices", lambda: _map_grid(entry, mats(), 3))}

        def grid(key, depth):
            g = _grid(rule.get(key), (n,) * depth, key)
            return _map_grid(lambda v: _scalar_text(fld, v), g, depth)
        return {"kind": kind, "c": _keyed("c", grid, "c", 3), "d": _keyed("d", grid, "d", 2)}

    @classmethod
    def from_text(cls, text: str) -> "ProblemSpec":
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            m = re.search(r"line (\d+)", str(exc))
            raise SpecError(f"TOML syntax error: {exc}", int(m.group(1)) if m else None) from None
        return cls.from_mapping(data, text)

    @classmethod
    def load(cls, path: str | Path) -> "ProblemSpec":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise SpecError(f"cannot read spec file: {exc}") from None
        return cls.from_text(text)

    # echo
    def to_mapping(self) -> dict:
        out: dict = {
            "space": {"n": self.n, "field": _field_text(self.field)},
            "rule": dict(self.rule),
            "options": {"max_degree": self.options.max_degree,
                        "rewrite_budget": self.options.rewrite_budget,
                        "seed": self.options.seed},
        }
        if self.relations:
            out["relations"] = list(self.relations)
        if self.twists:
            out["twists"] = {k: self.twists[k] for k in sorted(self.twists)}
        return out

    def __eq__(self, other):
        if not isinstance(other, ProblemSpec):
            return NotImplemented
        return self.to_mapping() == other.to_mapping()

    def __hash__(self):
        return hash(repr(self.to_mapping()))

    # builders
    def build_rule(self) -> tuple[CommRule, Optional[AssociativityReport]]:
        n, fld, kind = self.n, self.field, self.rule_kind
        if kind in TWIST_KINDS:
            return rule_from_twist(twist_from_payload(self.rule, n, fld)), None
        if kind == "general":
            mats = _map_grid(lambda s: parse(s, n, fld), self.rule["matrices"], 3)
            return CommRule.from_matrices(n, fld, mats), None
        c = _map_grid(lambda v: _scalar(fld, v), self.rule["c"], 3)
        d = _map_grid(lambda v: _scalar(fld, v), self.rule["d"], 2)
        return universal_rule(c, d, fld)

    def relation_polys(self) -> list[NcPoly]:
        return [parse(r, self.n, self.field) for r in self.relations]

    def twist(self, name: str) -> Optional[Twist]:
        payload = self.twists.get(name)
        return None if payload is None else twist_from_payload(payload, self.n, self.field)

    def mu(self) -> FieldElement:
        return _scalar(self.field, self.twists.get("mu", "1"))

    def hlavaty_g(self) -> list[FieldElement]:
        return [_scalar(self.field, c) for c in self.twists.get("hlavaty_g", DEFAULT_HLAVATY_G)]
