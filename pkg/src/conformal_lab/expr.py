"""Parser for the polynomial expression grammar.

::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*          # '/' only by a nonzero integer literal
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' INT)?
    atom    := INT | 'd' | 't' | 'x' INT | '(' expr ')'

Whitespace is ignored.  Rationals are written ``a/b``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import DefinitionSyntaxError
from .polyring import DEFPARAM, PARTIAL, MultiPoly, slot

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>x\d+|d|t)|(?P<op>[-+*/^()])|(?P<bad>\S))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int  # 0-based within the parsed string


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        kind = m.lastgroup
        if kind == "bad":
            raise DefinitionSyntaxError(
                f"unexpected character {m.group(kind)!r}", line, col0 + m.start(kind) + 1,
                expected=("number", "variable", "'('"), text=text,
            )
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.rstrip())))
    return toks


class _Parser:
    def __init__(self, text: str, line: int, col0: int):
        self.text = text
        self.line = line
        self.col0 = col0
        self.toks = _tokenize(text, line, col0)
        self.i = 0

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, tok: _Tok, expected) -> None:
        what = "end of expression" if tok.kind == "end" else repr(tok.text)
        raise DefinitionSyntaxError(
            f"unexpected {what}", self.line, self.col0 + tok.col + 1, expected=expected, text=self.text
        )

    def parse(self) -> MultiPoly:
        p = self.expr()
        if self.peek().kind != "end":
            self.fail(self.peek(), ("'+'", "'-'", "'*'", "end of expression"))
        return p

    def expr(self) -> MultiPoly:
        p = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.take().text
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> MultiPoly:
        p = self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            op = self.take().text
            if op == "*":
                p = p * self.unary()
            else:
                tok = self.peek()
                if tok.kind != "int":
                    self.fail(tok, ("integer divisor",))
                self.take()
                if int(tok.text) == 0:
                    raise DefinitionSyntaxError("division by zero", self.line, self.col0 + tok.col + 1, text=self.text)
                p = p * Fraction(1, int(tok.text))
        return p

    def unary(self) -> MultiPoly:
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("-", "+"):
            self.take()
            p = self.unary()
            return -p if tok.text == "-" else p
        return self.power()

    def power(self) -> MultiPoly:
        base = self.atom()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            tok = self.peek()
            if tok.kind != "int":
                self.fail(tok, ("integer exponent",))
            self.take()
            return base ** int(tok.text)
        return base

    def atom(self) -> MultiPoly:
        tok = self.peek()
        if tok.kind == "int":
            self.take()
            return MultiPoly.const(int(tok.text))
        if tok.kind == "var":
            self.take()
            if tok.text == "d":
                return MultiPoly.var(PARTIAL)
            if tok.text == "t":
                return MultiPoly.var(DEFPARAM)
            return MultiPoly.var(slot(int(tok.text[1:])))
        if tok.kind == "op" and tok.text == "(":
            self.take()
            p = self.expr()
            close = self.peek()
            if close.kind != "op" or close.text != ")":
                self.fail(close, ("')'",))
            self.take()
            return p
        self.fail(tok, ("number", "variable", "'('"))
        raise AssertionError("unreachable")


def parse_poly(text: str, line: int = 1, col: int = 1) -> MultiPoly:
    """Parse ``text`` into a :class:`MultiPoly`.

    ``line``/``col`` locate ``text`` inside a larger file so that errors point at
    the right place.
    """
    if not text.strip():
        raise DefinitionSyntaxError("empty expression", line, col, expected=("expression",), text=text)
    return _Parser(text, line, col - 1).parse()
