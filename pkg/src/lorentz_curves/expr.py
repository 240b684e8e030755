"""
Closed-form curve expressions.

Grammar::

    curve   := "(" expr "," expr "," expr ")"
    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("-" | "+") unary | power
    power   := atom ("^" unary)?          # right-associative, binds tighter than unary minus
    atom    := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

so ``-s^2`` is ``-(s^2)`` and ``2^-1`` is ``2^(-1)``.  Exponents must fold to an
integer or half-integer constant; half-integers are lowered to ``sqrt``.
The only free identifier is the curve parameter; ``pi`` and ``e`` are
predefined constants.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from . import jet as jetlib
from .errors import (
    DivisionBySingularity,
    DomainError,
    ParseError,
    PoleError,
    UnboundVariable,
    UnknownFunction,
)
from .jet import JET_ORDER, Jet

#: evaluation closer than this to a declared excluded point is refused
POLE_GUARD = 1e-6

CONSTANTS = {"pi": math.pi, "e": math.e}


# -- AST -----------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float
    name: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or a function name
    child: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


Expr = Union[Constant, Variable, Unary, Binary]


# -- lexer ---------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # num, ident, op, end
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    # offsets are byte offsets into the UTF-8 encoding
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("end", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


# -- parser --------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, param: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.param = param

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, text: str, what: str | None = None) -> _Token:
        t = self.tok
        if t.kind == "op" and t.text == text:
            return self.advance()
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"expected {what or repr(text)}, found {found}", t.offset)

    def finish(self):
        if self.tok.kind != "end":
            raise ParseError(f"unexpected trailing token {self.tok.text!r}", self.tok.offset)

    def curve(self):
        self.expect("(", "'(' opening the component triple")
        comps = [self.expr()]
        for _ in range(2):
            self.expect(",", "',' between components")
            comps.append(self.expr())
        self.expect(")", "')' closing the component triple")
        self.finish()
        return tuple(comps)

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            child = self.unary()
            return Unary("neg", child) if op == "-" else child
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            offset = self.tok.offset
            exponent = self.unary()
            _check_exponent(exponent, offset)
            return Binary("^", base, exponent)
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Constant(float(t.text))
        if t.kind == "ident":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in jetlib.FUNCTIONS:
                    raise UnknownFunction(f"unknown function {t.text!r}", t.offset)
                self.advance()
                arg = self.expr()
                self.expect(")", f"')' closing {t.text}(")
                return Unary(t.text, arg)
            if t.text == self.param:
                return Variable(t.text)
            if t.text in CONSTANTS:
                return Constant(CONSTANTS[t.text], t.text)
            if t.text in jetlib.FUNCTIONS:
                raise ParseError(f"expected '(' after function {t.text!r}", self.tok.offset)
            raise UnboundVariable(f"unbound identifier {t.text!r}", t.offset)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")", "')'")
            return node
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"expected an expression, found {found}", t.offset)


def _contains_variable(node: Expr) -> bool:
    if isinstance(node, Variable):
        return True
    if isinstance(node, Unary):
        return _contains_variable(node.child)
    if isinstance(node, Binary):
        return _contains_variable(node.left) or _contains_variable(node.right)
    return False


def _fold_exponent(node: Expr) -> Fraction:
    """Exponent as a fraction with denominator 1 or 2."""
    value = evaluate(node, math.nan)
    twice = 2.0 * value
    if not math.isfinite(value) or abs(twice - round(twice)) > 1e-12:
        raise ValueError(value)
    return Fraction(round(twice), 2)


def _check_exponent(node: Expr, offset: int):
    if _contains_variable(node):
        raise ParseError("exponent must be a constant", offset)
    try:
        _fold_exponent(node)
    except (ValueError, ArithmeticError):
        raise ParseError("exponent must be an integer or half-integer constant", offset) from None


def parse_expression(text: str, param: str = "s") -> Expr:
    """Parse a single scalar expression in ``param``."""
    p = _Parser(text, param)
    node = p.expr()
    p.finish()
    return node


# -- evaluation ----------------------------------------------------------------


def evaluate(node: Expr, x):
    """Evaluate ``node`` with the parameter bound to ``x`` (a float or a Jet)."""
    if isinstance(node, Constant):
        return node.value
    if isinstance(node, Variable):
        return x
    if isinstance(node, Unary):
        v = evaluate(node.child, x)
        if node.op == "neg":
            return -v
        return jetlib.FUNCTIONS[node.op](v)
    left = evaluate(node.left, x)
    op = node.op
    if op == "^":
        return _power(left, _fold_exponent(node.right))
    right = evaluate(node.right, x)
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if not isinstance(right, Jet) and right == 0:
            raise DivisionBySingularity("division by zero")
        return left / right
    raise ValueError(f"unknown operator {op!r}")


def _power(base, exponent: Fraction):
    if exponent.denominator == 2:
        base = jetlib.sqrt(base)
        n = exponent.numerator
    else:
        n = int(exponent)
    if isinstance(base, Jet):
        return base**n
    if base == 0 and n < 0:
        raise DivisionBySingularity("zero raised to a negative power")
    return float(base) ** n


# -- printing ------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_text(node: Expr) -> str:
    """Render ``node`` back to source text that parses to the same tree."""
    return _fmt(node)


def _fmt(node: Expr) -> str:
    if isinstance(node, Constant):
        if node.name is not None:
            return node.name
        return repr(node.value)
    if isinstance(node, Variable):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return "-" + _wrap(node.child, _PREC["neg"], strict=False)
        return f"{node.op}({_fmt(node.child)})"
    p = _PREC[node.op]
    if node.op == "^":
        # left operand must be an atom; the right operand is parsed at unary level
        return f"{_wrap(node.left, p, strict=True)}^{_wrap(node.right, _PREC['neg'], strict=False)}"
    left = _wrap(node.left, p, strict=False)
    right = _wrap(node.right, p, strict=True)
    return f"{left} {node.op} {right}"


def _prec_of(node: Expr) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary) and node.op == "neg":
        return _PREC["neg"]
    return 5


def _wrap(node: Expr, parent: int, strict: bool) -> str:
    text = _fmt(node)
    q = _prec_of(node)
    if q < parent or (strict and q == parent):
        return f"({text})"
    return text


# -- curves --------------------------------------------------------------------


@dataclass(frozen=True)
class CurveDef:
    """Three component expressions of a single parameter over a closed interval."""

    components: tuple
    param_name: str = "s"
    domain: tuple = (-math.inf, math.inf)
    excluded_points: tuple = ()
    source: str | None = field(default=None, compare=False)

    def __post_init__(self):
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError(f"empty curve domain {self.domain!r}")
        if len(self.components) != 3:
            raise ValueError("a curve needs exactly three components")

    def position(self, s0: float) -> np.ndarray:
        return self.derivatives(s0, 0)[0]

    def derivatives(self, s0: float, k_max: int = JET_ORDER) -> np.ndarray:
        return eval_derivatives(self, s0, k_max)

    def jets(self, s0: float, order: int = JET_ORDER) -> np.ndarray:
        """Object array of the three component jets about ``s0``."""
        self._check_point(s0)
        x = Jet.variable(float(s0), order)
        out = np.empty(3, dtype=object)
        try:
            for i, node in enumerate(self.components):
                v = evaluate(node, x)
                out[i] = v if isinstance(v, Jet) else Jet.constant(v, order)
        except DivisionBySingularity as exc:
            raise PoleError(f"pole of the curve at s={s0!r}: {exc}") from exc
        return out

    def _check_point(self, s0: float):
        lo, hi = self.domain
        if not (lo <= s0 <= hi):
            raise DomainError(f"s={s0!r} outside curve domain [{lo}, {hi}]")
        for p in self.excluded_points:
            if abs(s0 - p) <= POLE_GUARD:
                raise PoleError(f"s={s0!r} within {POLE_GUARD} of excluded point {p!r}")

    def text(self) -> str:
        return "(" + ", ".join(to_text(c) for c in self.components) + ")"


def parse_curve(text: str, domain=None, excluded_points=(), param: str = "s") -> CurveDef:
    """Parse ``"(x0, x1, x2)"`` into a :class:`CurveDef`.

    Examples
    --------
    >>> c = parse_curve("(0, s, 0)")
    >>> c.components[1]
    Variable(name='s')
    """
    comps = _Parser(text, param).curve()
    return CurveDef(
        components=comps,
        param_name=param,
        domain=tuple(domain) if domain is not None else (-math.inf, math.inf),
        excluded_points=tuple(float(p) for p in excluded_points),
        source=text,
    )


def eval_derivatives(curve: CurveDef, s0: float, k_max: int = JET_ORDER) -> np.ndarray:
    """Derivatives ``alpha^(0) .. alpha^(k_max)`` at ``s0`` as a ``(k_max+1, 3)`` array."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    comps = curve.jets(s0, k_max)
    return np.array([c.derivatives() for c in comps]).T
