"""Recursive-descent parser for the scalar / polynomial text grammar.

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := uint ['/' uint] | 'z' | 'x' uint | '(' expr ')'

The parser is agnostic of the value type: callers supply constructors for
rationals, the root of unity ``z`` and generators ``x<i>``.  Values only need
``+``, ``-``, ``*``, unary ``-`` and ``** int``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable, Optional

_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+)|(z)|([-+*/^()]))")


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("var", m.group(2), start))
        elif m.group(3):
            tokens.append(("zeta", "z", start))
        else:
            tokens.append(("op", m.group(4), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, scalar, zeta, variable):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.scalar = scalar
        self.zeta = zeta
        self.variable = variable

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok[2], self.text)

    def expect_op(self, op):
        tok = self.take()
        if tok != ("op", op, tok[2]):
            raise self.error(f"expected {op!r}", tok)

    def expr(self):
        negate = False
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            negate = tok[1] == "-"
        value = self.term()
        if negate:
            value = -value
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                value = value + rhs if tok[1] == "+" else value - rhs
            else:
                return value

    def term(self):
        value = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            value = value * self.factor()
        return value

    def factor(self):
        value = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise self.error("expected a non-negative integer exponent", tok)
            value = value ** int(tok[1])
        return value

    def atom(self):
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            num = int(val)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                den_tok = self.take()
                if den_tok[0] != "num":
                    raise self.error("expected an integer denominator", den_tok)
                den = int(den_tok[1])
                if den == 0:
                    raise self.error("zero denominator", den_tok)
                return self.scalar(Fraction(num, den))
            return self.scalar(num)
        if kind == "zeta":
            if self.zeta is None:
                raise self.error("the symbol z is only available over a cyclotomic field", tok)
            return self.zeta()
        if kind == "var":
            if self.variable is None:
                raise self.error("generators are not allowed in a scalar", tok)
            index = int(val[1:])
            try:
                return self.variable(index)
            except ValueError as exc:
                raise ParseError(str(exc), pos, self.text) from None
        if kind == "op" and val == "(":
            value = self.expr()
            self.expect_op(")")
            return value
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected {val!r}", tok)


def parse_expression(
    text: str,
    *,
    scalar: Callable,
    zeta: Optional[Callable] = None,
    variable: Optional[Callable[[int], object]] = None,
):
    parser = _Parser(text, scalar, zeta, variable)
    if parser.peek()[0] == "end":
        raise parser.error("empty expression")
    value = parser.expr()
    tok = parser.peek()
    if tok[0] != "end":
        raise parser.error(f"unexpected {tok[1]!r}", tok)
    return value
