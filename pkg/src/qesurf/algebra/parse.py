"""Parser for the textual expression format.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary | power)*   juxtaposition multiplies
    unary  := "-" unary | power
    power  := atom ("^" ["-"] INT)?
    atom   := INT | NAME | "(" expr ")"
"""

import re

from ..errors import ParseError, UnknownVariable
from .poly import Poly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def tokenize(text):
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("int", int(num)))
        elif name is not None:
            tokens.append(("name", name))
        elif op in "+-*/^()":
            tokens.append(("op", op))
        else:
            raise ParseError(f"unexpected character {op!r} in {text!r}")
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text, leaf, allow_division):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.leaf = leaf
        self.allow_division = allow_division

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind} at token {self.i} in {self.text!r}")
        self.i += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise ParseError("empty expression")
        out = self.expr()
        if self.i != len(self.tokens):
            raise ParseError(f"trailing input at token {self.i} in {self.text!r}")
        return out

    def expr(self):
        out = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.unary()
        while True:
            kind, value = self.peek()
            if kind in ("int", "name") or (kind, value) == ("op", "("):
                out = out * self.power()
                continue
            if (kind, value) not in (("op", "*"), ("op", "/")):
                break
            op = self.take()[1]
            rhs = self.unary()
            if op == "*":
                out = out * rhs
            elif not self.allow_division:
                raise ParseError("division is not allowed in a polynomial")
            else:
                out = out / rhs
        return out

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            sign = 1
            if self.peek() == ("op", "-"):
                self.take()
                sign = -1
            exp = sign * self.take("int")[1]
            if exp < 0 and not self.allow_division:
                raise ParseError("negative exponent in a polynomial")
            return base ** exp
        return base

    def atom(self):
        kind, value = self.peek()
        if kind == "int":
            self.take()
            return self.leaf(value)
        if kind == "name":
            self.take()
            return self.leaf(value)
        if (kind, value) == ("op", "("):
            self.take()
            out = self.expr()
            self.take("op", ")")
            return out
        raise ParseError(f"unexpected token {value!r} in {self.text!r}")


def parse_elem(text, field):
    def leaf(v):
        return field.const(v) if isinstance(v, int) else field.var(v)
    return _Parser(text, leaf, allow_division=True).parse()


def parse_poly(text, p, variables):
    variables = set(variables)

    def leaf(v):
        if isinstance(v, int):
            return Poly.constant(p, v)
        if v not in variables:
            raise UnknownVariable(f"unknown variable {v!r}")
        return Poly.var(p, v)
    return _Parser(text, leaf, allow_division=False).parse()
