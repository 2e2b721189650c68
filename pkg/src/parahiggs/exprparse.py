"""Recursive-descent parser for the exact expression language.

The grammar (documented in docs/expression-grammar.ebnf) covers integers,
rationals via '/', the imaginary unit i, the variable z, + - * /, integer
exponents with '^', and parentheses. Everything parses into an exact
RationalFunction over Q(i); inputs that must be scalars are checked for
constancy afterwards.
"""

from __future__ import annotations

from .errors import ParseError
from .qi import QQI, GaussianRational, QI_I
from .poly import UniPoly, VAR_Z
from .ratfunc import RationalFunction


class _Tokens:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.items = []
        self._lex()
        self.idx = 0

    def _lex(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                self.items.append(("int", text[i:j], i))
                i = j
                continue
            if ch in "+-*/^()":
                self.items.append((ch, ch, i))
                i += 1
                continue
            if ch.isalpha():
                j = i
                while j < len(text) and text[j].isalnum():
                    j += 1
                self.items.append(("name", text[i:j], i))
                i = j
                continue
            raise ParseError(f"unexpected character {ch!r} at position {i}", {"text": text, "pos": i})
        self.items.append(("end", "", len(text)))

    def peek(self):
        return self.items[self.idx]

    def take(self):
        tok = self.items[self.idx]
        if tok[0] != "end":
            self.idx += 1
        return tok


class _Parser:
    def __init__(self, text: str, var: str):
        self.toks = _Tokens(text)
        self.var = var
        self.one = RationalFunction.const(var, QQI.one)

    def parse(self) -> RationalFunction:
        value = self.expr()
        tok = self.toks.peek()
        if tok[0] != "end":
            raise ParseError(
                f"trailing input at position {tok[2]}: {tok[1]!r}",
                {"text": self.toks.text, "pos": tok[2]},
            )
        return value

    def expr(self) -> RationalFunction:
        value = self.term()
        while True:
            tok = self.toks.peek()
            if tok[0] == "+":
                self.toks.take()
                value = value + self.term()
            elif tok[0] == "-":
                self.toks.take()
                value = value - self.term()
            else:
                return value

    def term(self) -> RationalFunction:
        value = self.factor()
        while True:
            tok = self.toks.peek()
            if tok[0] == "*":
                self.toks.take()
                value = value * self.factor()
            elif tok[0] == "/":
                self.toks.take()
                divisor = self.factor()
                if divisor.is_zero():
                    raise ParseError("division by zero", {"text": self.toks.text})
                value = value / divisor
            else:
                return value

    def factor(self) -> RationalFunction:
        tok = self.toks.peek()
        if tok[0] == "-":
            self.toks.take()
            return -self.factor()
        if tok[0] == "+":
            self.toks.take()
            return self.factor()
        return self.power()

    def power(self) -> RationalFunction:
        base = self.atom()
        while self.toks.peek()[0] == "^":
            self.toks.take()
            sign = 1
            tok = self.toks.take()
            if tok[0] == "-":
                sign = -1
                tok = self.toks.take()
            if tok[0] != "int":
                raise ParseError(
                    f"exponent must be an integer, got {tok[1]!r}",
                    {"text": self.toks.text, "pos": tok[2]},
                )
            k = sign * int(tok[1])
            if k < 0 and base.is_zero():
                raise ParseError("zero to a negative power", {"text": self.toks.text})
            base = base**k
        return base

    def atom(self) -> RationalFunction:
        tok = self.toks.take()
        if tok[0] == "int":
            return RationalFunction.const(self.var, GaussianRational(int(tok[1])))
        if tok[0] == "name":
            if tok[1] == "i":
                return RationalFunction.const(self.var, QI_I)
            if tok[1] == self.var:
                return RationalFunction(UniPoly.gen(self.var))
            raise ParseError(
                f"unknown symbol {tok[1]!r} (allowed: i, {self.var})",
                {"text": self.toks.text, "pos": tok[2]},
            )
        if tok[0] == "(":
            value = self.expr()
            closing = self.toks.take()
            if closing[0] != ")":
                raise ParseError("missing closing parenthesis", {"text": self.toks.text, "pos": closing[2]})
            return value
        raise ParseError(
            f"unexpected token {tok[1]!r} at position {tok[2]}",
            {"text": self.toks.text, "pos": tok[2]},
        )


def parse_ratfunc(text: str, var: str = VAR_Z) -> RationalFunction:
    """Parse an expression in the variable `var` over Q(i)."""
    if not isinstance(text, str):
        raise ParseError(f"expected an expression string, got {type(text).__name__}")
    return _Parser(text, var).parse()


def parse_scalar(text) -> GaussianRational:
    """Parse an expression that must be a constant of Q(i)."""
    if isinstance(text, int):
        return GaussianRational(text)
    f = parse_ratfunc(text)
    if not f.is_polynomial() or f.num.degree > 0:
        raise ParseError(f"expected a constant, got {text!r}")
    return f.as_poly().constant()
