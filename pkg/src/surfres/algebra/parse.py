"""Recursive-descent parser for polynomial text such as ``z^2 - x^2*y + 3/2*a*x``.

Identifiers are ring variables, or the generator name of a finite extension field
(which evaluates to a constant).  Division is only allowed by nonzero constants.
"""
from __future__ import annotations

import re

from .poly import Poly, Ring


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def tokenize(text: str) -> list[tuple[str, str]]:
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r} at position {pos}")
        num, name, op = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, ring: Ring):
        self.toks = tokens
        self.i = 0
        self.ring = ring
        self.field = ring.field

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op):
        kind, val = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}, got {val!r}")

    def expr(self) -> Poly:
        kind, val = self.peek()
        neg = False
        if kind == "op" and val in "+-":
            self.take()
            neg = val == "-"
        acc = self.term()
        if neg:
            acc = -acc
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self) -> Poly:
        acc = self.power()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.power()
                if val == "*":
                    acc = acc * rhs
                else:
                    if rhs.variables() or not rhs.terms:
                        raise ParseError("division by a non-constant or zero")
                    acc = acc.scale(self.field.inv(rhs.constant_term()))
            elif kind in ("name", "num") or (kind == "op" and val == "("):
                acc = acc * self.power()  # implicit multiplication like 2x
            else:
                return acc

    def power(self) -> Poly:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            k2, v2 = self.peek()
            if k2 == "op" and v2 == "-":
                raise ParseError("negative exponents are not allowed")
            kind, val = self.take()
            if kind != "num":
                raise ParseError(f"exponent must be an integer, got {val!r}")
            return base ** (sign * int(val))
        return base

    def atom(self) -> Poly:
        kind, val = self.take()
        if kind == "num":
            return self.ring.const(self.field.from_int(int(val)))
        if kind == "name":
            if val in self.ring.names:
                return self.ring.var(val)
            gen_name = getattr(self.field, "gen_name", None)
            if gen_name is not None and val == gen_name and hasattr(self.field, "gen"):
                return self.ring.const(self.field.gen())
            raise ParseError(f"unknown identifier {val!r}")
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind == "op" and val == "-":
            return -self.power()
        raise ParseError(f"unexpected token {val!r}")


def parse_poly(text: str, ring: Ring) -> Poly:
    text = text.strip()
    if not text:
        raise ParseError("empty polynomial")
    parser = _Parser(tokenize(text), ring)
    result = parser.expr()
    if parser.i != len(parser.toks):
        raise ParseError(f"trailing input at token {parser.toks[parser.i][1]!r}")
    return result
