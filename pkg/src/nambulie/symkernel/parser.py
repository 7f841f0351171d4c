"""Recursive-descent parser for the expression grammar.

Grammar::

    expr   := ['+' | '-'] term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ['^' ['-'] integer]
    atom   := integer | 'I' | coord | param | func '(' expr ')' | '(' expr ')'
    coord  := 'x1' .. 'x8'
    func   := 'exp' | 'sin' | 'cos'

``p/q`` literals are ordinary divisions of integers.  ``I`` is the imaginary
unit.  Division and negative powers are allowed only for nonzero constants and
pure exponential units ``c*exp(lambda.x)``.  Arguments of ``exp``, ``sin`` and
``cos`` must be linear forms in the coordinates without a constant part; a
form that vanishes identically (``exp(0*x1)`` after a parameter binding) is
allowed and gives the constant value.
"""

from __future__ import annotations

import re
from typing import Mapping

from .exppoly import MAX_AXES, ExpPoly
from .numbers import IUNIT, GaussianRational, ParamPoly, gr

FUNCTIONS = ("exp", "sin", "cos")

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class ExprSyntaxError(SyntaxError):
    """Malformed expression; ``pos`` is the 0-based character offset."""

    def __init__(self, msg: str, src: str = "", pos: int = 0):
        super().__init__(f"{msg} at position {pos}")
        self.msg_text = msg
        self.src = src
        self.pos = pos


class UnknownSymbol(ExprSyntaxError):
    """Identifier that is neither a coordinate, a parameter nor a known function."""


def _tokenize(src: str):
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            toks.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", src, m.start(3))
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


_COORD = re.compile(r"x([1-9]\d*)$")


class _Parser:
    def __init__(self, src: str, env: Mapping[str, object], max_axes: int):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0
        self.env = env
        self.max_axes = max_axes

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None, cls=ExprSyntaxError):
        tok = tok or self.peek()
        return cls(msg, self.src, tok[2])

    def expect(self, value):
        t = self.peek()
        if t[0] != "op" or t[1] != value:
            raise self.error(f"expected {value!r}")
        return self.take()

    def parse(self) -> ExpPoly:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self) -> ExpPoly:
        e = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                e = e + rhs if t[1] == "+" else e - rhs
            else:
                return e

    def term(self) -> ExpPoly:
        e = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                rhs = self.unary()
                if t[1] == "*":
                    e = e * rhs
                else:
                    e = e * self.invert(rhs, t)
            else:
                return e

    def invert(self, e: ExpPoly, tok) -> ExpPoly:
        if e.is_zero():
            raise self.error("division by zero", tok)
        if not e.is_unit():
            raise self.error("division by an expression that is not a constant or an exponential unit", tok)
        return e.unit_inverse()

    def unary(self) -> ExpPoly:
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return -self.unary()
        if t[0] == "op" and t[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> ExpPoly:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            neg = False
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                neg = True
            n = self.peek()
            if n[0] != "int":
                raise self.error("exponent must be an integer literal")
            self.take()
            k = int(n[1])
            if neg:
                return self.invert(base, t) ** k
            return base**k
        return base

    def atom(self) -> ExpPoly:
        t = self.take()
        kind, val, pos = t
        if kind == "int":
            return ExpPoly.const(int(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "name":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                if val not in FUNCTIONS:
                    raise self.error(f"unknown function {val!r}", t, UnknownSymbol)
                self.take()
                arg = self.expr()
                self.expect(")")
                return self.apply(val, arg, t)
            if val in FUNCTIONS:
                raise self.error(f"function {val!r} needs an argument", nxt)
            if val == "I":
                return ExpPoly.const(IUNIT)
            m = _COORD.match(val)
            if m:
                ax = int(m.group(1))
                if ax > self.max_axes:
                    raise self.error(f"unknown coordinate {val!r}", t, UnknownSymbol)
                return ExpPoly.coord(ax)
            if val in self.env:
                return ExpPoly.const(gr(self.env[val]))
            return ExpPoly.const(ParamPoly.symbol(val))
        if kind == "end":
            raise self.error("unexpected end of input", t)
        raise self.error(f"unexpected token {val!r}", t)

    def apply(self, fn: str, arg: ExpPoly, tok) -> ExpPoly:
        freq = {}
        for (powers, f), c in arg.items():
            if f or len(powers) != 1 or powers[0][1] != 1:
                raise self.error(f"argument of {fn} must be a linear form in the coordinates", tok)
            freq[powers[0][0]] = c
        if fn == "exp":
            return ExpPoly.exp_linear(freq)
        plus = ExpPoly.exp_linear({ax: lam * IUNIT for ax, lam in freq.items()})
        minus = ExpPoly.exp_linear({ax: -(lam * IUNIT) for ax, lam in freq.items()})
        half = GaussianRational(1, 0) / 2
        if fn == "cos":
            return (plus + minus).scale(half)
        # sin u = (e^{iu} - e^{-iu}) / (2i)
        return (plus - minus).scale(half * IUNIT.conjugate())


def parse(src: str, env: Mapping[str, object] | None = None, max_axes: int = MAX_AXES) -> ExpPoly:
    """Parse ``src`` into normal form.

    Identifiers bound in ``env`` are replaced by their exact values while
    parsing, which also allows division by them (``x1/a`` with ``a`` bound).
    """
    if not isinstance(src, str):
        raise TypeError("expression source must be a string")
    return _Parser(src, env or {}, max_axes).parse()
