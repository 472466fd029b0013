"""Expression language for user-supplied generating functions W+(x).

Grammar (whitespace insensitive)::

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := "-" factor | power
    power  := atom ("^" exponent)?
    atom   := number | "x" | "i" | ident "(" expr ")" | "(" expr ")"

``^`` binds tighter than unary minus and is right-associative.  Exponents must
be constants (they may not mention ``x``), so ``x^2``, ``x^-0.5``, ``x^(1/3)``
and ``x^(0.5+2*i)`` are accepted while ``x^x`` is not.  Both the ASCII hyphen
and U+2212 MINUS SIGN are accepted for minus.

Complex powers of a non-integer exponent use the principal branch
``exp(p*log(base))``, with the cut on the negative real axis.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import EvaluationError, ParseError
from .jet import Jet

FUNCTIONS = ("exp", "sin", "cos", "sinh", "cosh", "tanh", "sqrt")


# -- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: "Node"  # constant subtree


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Num, Var, ImagUnit, Neg, BinOp, Pow, Call]


def Add(a, b):
    return BinOp("+", a, b)


def Sub(a, b):
    return BinOp("-", a, b)


def Mul(a, b):
    return BinOp("*", a, b)


def Div(a, b):
    return BinOp("/", a, b)


# -- tokenizer --------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+\-−]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[+\-−*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # number, name, op, end
    text: str
    offset: int  # byte offset


def tokenize(source: str) -> list[_Tok]:
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        offset = len(source[:pos].encode("utf-8"))
        if m is None:
            raise ParseError(offset, f"unexpected character {source[pos]!r}")
        if m.lastgroup != "ws":
            tokens.append(_Tok(m.lastgroup, m.group().replace("−", "-"), offset))
        pos = m.end()
    tokens.append(_Tok("end", "", len(source.encode("utf-8"))))
    return tokens


# -- parser -----------------------------------------------------------------

_BINARY = {"+": 10, "-": 10, "*": 20, "/": 20}
_UNARY_BP = 30
_POW_BP = 40
_OPERAND_START = {"number", "x", "i", "function", "("}


class _Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.i = 0

    def peek(self) -> _Tok:
        return self.tokens[self.i]

    def advance(self) -> _Tok:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> Node:
        node = self.expression(0)
        tok = self.peek()
        if tok.kind != "end":
            if tok.text == ")":
                raise ParseError(tok.offset, "unbalanced parentheses: unmatched ')'", {"operator", "end of input"})
            raise ParseError(tok.offset, f"unexpected {_describe(tok)}", {"operator", "end of input"})
        return node

    def expression(self, min_bp: int) -> Node:
        left = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in _BINARY:
                bp = _BINARY[tok.text]
                if bp <= min_bp:
                    break
                self.advance()
                right = self.expression(bp)
                left = BinOp(tok.text, left, right)
            elif tok.kind == "op" and tok.text == "^":
                if _POW_BP <= min_bp:
                    break
                self.advance()
                left = Pow(left, self.exponent())
            else:
                break
        return left

    def exponent(self) -> Node:
        start = self.peek()
        if start.kind == "end" or (start.kind == "op" and start.text not in ("-", "(")):
            raise ParseError(start.offset, f"expected a constant exponent, found {_describe(start)}", _OPERAND_START | {"-"})
        # right-associative: the exponent may itself carry a power
        node = self.expression(_POW_BP - 1)
        if _mentions_x(node):
            raise ParseError(start.offset, "non-literal exponent: exponents must not depend on x", {"number", "i"})
        return node

    def prefix(self) -> Node:
        tok = self.advance()
        if tok.kind == "number":
            return Num(float(tok.text))
        if tok.kind == "name":
            if tok.text == "x":
                return Var()
            if tok.text == "i":
                return ImagUnit()
            if tok.text in FUNCTIONS:
                opening = self.peek()
                if opening.text != "(":
                    raise ParseError(opening.offset, f"function {tok.text!r} requires a parenthesized argument", {"("})
                self.advance()
                if self.peek().text == ")":
                    raise ParseError(self.peek().offset, f"arity mismatch: {tok.text!r} takes one argument", _OPERAND_START)
                arg = self.expression(0)
                closing = self.peek()
                if closing.text == ",":
                    raise ParseError(closing.offset, f"arity mismatch: {tok.text!r} takes one argument", {")"})
                if closing.text != ")":
                    if closing.kind == "end":
                        raise ParseError(closing.offset, "unbalanced parentheses: missing ')'", {")"})
                    raise ParseError(closing.offset, f"arity mismatch or stray token after argument of {tok.text!r}", {")"})
                self.advance()
                return Call(tok.text, arg)
            raise ParseError(tok.offset, f"unknown identifier {tok.text!r}", {"x", "i", *FUNCTIONS})
        if tok.kind == "op":
            if tok.text == "-":
                return Neg(self.expression(_UNARY_BP))
            if tok.text == "(":
                inner = self.expression(0)
                closing = self.peek()
                if closing.text != ")":
                    raise ParseError(closing.offset, "unbalanced parentheses: missing ')'", {")"})
                self.advance()
                return inner
        if tok.kind == "end":
            raise ParseError(tok.offset, "unexpected end of input", _OPERAND_START | {"-"})
        raise ParseError(tok.offset, f"unexpected {_describe(tok)}", _OPERAND_START | {"-"})


def _describe(tok: _Tok) -> str:
    return "end of input" if tok.kind == "end" else repr(tok.text)


def _mentions_x(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, (Num, ImagUnit)):
        return False
    if isinstance(node, Neg):
        return _mentions_x(node.operand)
    if isinstance(node, BinOp):
        return _mentions_x(node.left) or _mentions_x(node.right)
    if isinstance(node, Pow):
        return _mentions_x(node.base) or _mentions_x(node.exponent)
    if isinstance(node, Call):
        return _mentions_x(node.arg)
    raise TypeError(f"not an expression node: {node!r}")


def parse(source: str) -> Node:
    """Parse ``source`` into an immutable AST; raises :class:`ParseError`."""
    return _Parser(source).parse()


# -- printing ---------------------------------------------------------------

def to_source(node: Node) -> str:
    """Fully parenthesized source text that parses back to an equal AST."""
    if isinstance(node, Num):
        # the grammar has no negative literals; "-2" reads back as Neg(Num(2))
        text = repr(float(node.value))
        return f"({text})" if text.startswith("-") else text
    if isinstance(node, Var):
        return "x"
    if isinstance(node, ImagUnit):
        return "i"
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Pow):
        return f"({to_source(node.base)}^{to_source(node.exponent)})"
    if isinstance(node, Call):
        return f"{node.name}({to_source(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation -------------------------------------------------------------

def constant_value(node: Node) -> complex:
    """Value of an x-free subtree."""
    if isinstance(node, Num):
        return complex(node.value)
    if isinstance(node, ImagUnit):
        return 1j
    if isinstance(node, Neg):
        return -constant_value(node.operand)
    if isinstance(node, BinOp):
        a, b = constant_value(node.left), constant_value(node.right)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if abs(b) < 1e-300:
            raise EvaluationError("division by a value with modulus below 1e-300")
        return a / b
    if isinstance(node, Pow):
        base, p = constant_value(node.base), constant_value(node.exponent)
        if p.imag == 0 and p.real == int(p.real):
            if base == 0 and p.real < 0:
                raise EvaluationError("zero raised to a negative power")
            return base ** int(p.real)
        if base == 0:
            raise EvaluationError("zero raised to a non-integer power")
        return cmath.exp(p * cmath.log(base))
    if isinstance(node, Call):
        return complex(getattr(cmath, node.name)(constant_value(node.arg)))
    raise EvaluationError("expression depends on x")


def evaluate(node: Node, t: Jet) -> Jet:
    """Evaluate ``node`` with the variable bound to the jet ``t``."""
    if isinstance(node, Var):
        return t
    if isinstance(node, (Num, ImagUnit)):
        return Jet.constant(constant_value(node), t.order, t.shape)
    if isinstance(node, Neg):
        return -evaluate(node.operand, t)
    if isinstance(node, BinOp):
        a = evaluate(node.left, t)
        b = evaluate(node.right, t)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        return a / b
    if isinstance(node, Pow):
        return evaluate(node.base, t) ** constant_value(node.exponent)
    if isinstance(node, Call):
        return getattr(evaluate(node.arg, t), node.name)()
    raise TypeError(f"not an expression node: {node!r}")


def eval_jet(node: Node | str, x, order: int = 2) -> Jet:
    """Value and derivatives of the expression at real point(s) ``x``.

    Raises :class:`EvaluationError` on division by (near) zero or when any
    component of the result is not finite.
    """
    if isinstance(node, str):
        node = parse(node)
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise EvaluationError("evaluation point is not finite")
    with np.errstate(all="ignore"):
        jet = evaluate(node, Jet.variable(x, order))
    if not jet.isfinite():
        raise EvaluationError("expression evaluated to a non-finite value")
    return jet


class ExprFunction:
    """A parsed expression usable wherever a jet function of x is expected."""

    def __init__(self, source: str):
        self.source = source
        self.ast = parse(source)

    def __call__(self, t: Jet) -> Jet:
        with np.errstate(all="ignore"):
            out = evaluate(self.ast, t)
        if not out.isfinite():
            raise EvaluationError(f"{self.source!r} evaluated to a non-finite value")
        return out

    def __repr__(self):
        return f"ExprFunction({self.source!r})"
