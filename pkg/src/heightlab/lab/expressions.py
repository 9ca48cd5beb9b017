"""Parser for coefficient expressions like ``(s^3 - 2)/(4*s + 1)``.

Grammar (one free variable, written ``s`` or ``u``, same indeterminate):

    expr   := term  (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+')* power
    power  := atom ('^' INT)?          # INT a literal, 0 <= INT <= 64
    atom   := INT | VAR | '(' expr ')'

Binary operators associate left; '^' binds tightest and its exponent must be
a plain integer literal.  The result is an exact :class:`RatFunc` over the
coefficient field of the requested base field.  All failures raise
:class:`ExpressionError` with the offending position.
"""

from __future__ import annotations

from ..errors import ExpressionError
from ..exact_arith import BaseField, RatFunc, Rationals

MAX_EXPONENT = 64

_OPS = set("+-*/^()")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
            continue
        if ch in ("s", "u"):
            if i + 1 < n and (text[i + 1].isalnum() or text[i + 1] == "_"):
                raise ExpressionError(f"unexpected name starting with {ch!r}", i)
            tokens.append(("var", ch, i))
            i += 1
            continue
        if ch in _OPS:
            tokens.append((ch, ch, i))
            i += 1
            continue
        raise ExpressionError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, tokens, field: BaseField):
        self.tokens = tokens
        self.pos = 0
        if isinstance(field, Rationals):
            self.coeff_field = field
        else:
            self.coeff_field = field.coeff_field
        self.var_letter: str | None = None

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.take()
        if tok[0] != kind:
            raise ExpressionError(f"expected {kind!r}, found {tok[0]!r}", tok[2])
        return tok

    def parse(self) -> RatFunc:
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionError(f"unexpected {tok[0]!r}", tok[2])
        return value

    def expr(self) -> RatFunc:
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op[0] == "+" else value - rhs
        return value

    def term(self) -> RatFunc:
        value = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.take()
            rhs = self.unary()
            if op[0] == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ExpressionError("division by zero", op[2])
                value = value / rhs
        return value

    def unary(self) -> RatFunc:
        sign = 1
        while self.peek()[0] in ("+", "-"):
            if self.take()[0] == "-":
                sign = -sign
        value = self.power()
        return -value if sign < 0 else value

    def power(self) -> RatFunc:
        value = self.atom()
        if self.peek()[0] == "^":
            caret = self.take()
            tok = self.take()
            if tok[0] != "int":
                raise ExpressionError("exponent must be an integer literal",
                                      caret[2])
            if tok[1] > MAX_EXPONENT:
                raise ExpressionError(
                    f"exponent {tok[1]} exceeds the cap {MAX_EXPONENT}", tok[2])
            if value.is_zero() and tok[1] == 0:
                raise ExpressionError("0^0 is undefined", caret[2])
            value = value ** tok[1]
        return value

    def atom(self) -> RatFunc:
        tok = self.take()
        if tok[0] == "int":
            return RatFunc.constant(self.coeff_field, tok[1])
        if tok[0] == "var":
            if self.var_letter is None:
                self.var_letter = tok[1]
            elif self.var_letter != tok[1]:
                raise ExpressionError(
                    f"expression mixes variables {self.var_letter!r} and "
                    f"{tok[1]!r} (one free variable allowed)", tok[2])
            return RatFunc.variable(self.coeff_field)
        if tok[0] == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ExpressionError(f"unexpected {tok[0]!r}", tok[2])


def parse_expression(text: str, field: BaseField) -> RatFunc:
    """Parse ``text`` into an exact rational function over ``field``'s
    coefficient field (Q, or F_p for F_p(u))."""
    if not isinstance(text, str) or not text.strip():
        raise ExpressionError("empty expression")
    return _Parser(_tokenize(text), field).parse()
