"""A tiny arithmetic language for user-defined local connection forms.

Grammar (``^`` binds tightest and is right-associative)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | "pi" | VAR | CALL | "(" expr ")"
    VAR    := ("m0" | "m1") "[" INTEGER "]"
    CALL   := NAME "(" expr ("," expr)* ")"

The only variables are the components of the two base points ``m0`` and
``m1``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import DomainError
from .group import mod2pi

FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "exp": 1,
    "log": 1,
    "abs": 1,
    "pow": 2,
    "mod2pi": 1,
}


class ExprSyntaxError(SyntaxError):
    """Parse failure at a byte offset, with the set of tokens that would fit."""

    def __init__(self, message: str, offset: int, expected: Sequence[str] = ()):
        self.byte_offset = offset
        self.expected = frozenset(expected)
        exp = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{exp}")


class ExprDomainError(DomainError):
    def __init__(self, message: str, offset: int):
        self.byte_offset = offset
        super().__init__(f"{message} at offset {offset}")


# AST.  Offsets do not take part in equality so structurally equal trees
# compare equal whatever their spacing.

@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Const:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Var:
    point: str
    index: int
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    left: "Node"
    right: "Node"
    offset: int = field(default=0, compare=False)
    symbol = "?"


class Add(BinOp):
    symbol = "+"


class Sub(BinOp):
    symbol = "-"


class Mul(BinOp):
    symbol = "*"


class Div(BinOp):
    symbol = "/"


class Pow(BinOp):
    symbol = "^"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    offset: int = field(default=0, compare=False)


Node = Union[Num, Const, Var, Neg, BinOp, Call]

_BINOPS = {"+": Add, "-": Sub, "*": Mul, "/": Div}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),\[\]])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | name | op | eof
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("eof", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise ExprSyntaxError(f"unexpected {what}", t.offset, expected)

    def expect(self, text: str) -> _Token:
        if self.tok.kind == "op" and self.tok.text == text:
            return self.advance()
        self.fail([text])

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            self.fail(["+", "-", "*", "/", "^", "end of input"])
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance()
            node = _BINOPS[op.text](node, self.term(), op.offset)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance()
            node = _BINOPS[op.text](node, self.unary(), op.offset)
        return node

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text == "-":
            op = self.advance()
            return Neg(self.unary(), op.offset)
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            op = self.advance()
            return Pow(base, self.unary(), op.offset)
        return base

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "number":
            self.advance()
            return Num(float(t.text), t.offset)
        if t.kind == "op" and t.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if t.kind == "name":
            self.advance()
            if t.text == "pi":
                return Const("pi", t.offset)
            if t.text in ("m0", "m1"):
                self.expect("[")
                idx = self.tok
                if idx.kind != "number" or not idx.text.isdigit():
                    self.fail(["integer"])
                self.advance()
                self.expect("]")
                return Var(t.text, int(idx.text), t.offset)
            if t.text in FUNCTIONS:
                self.expect("(")
                args = [self.expr()]
                while self.tok.kind == "op" and self.tok.text == ",":
                    self.advance()
                    args.append(self.expr())
                close = self.tok
                self.expect(")")
                if len(args) != FUNCTIONS[t.text]:
                    raise ExprSyntaxError(
                        f"{t.text} takes {FUNCTIONS[t.text]} argument(s), got {len(args)}",
                        close.offset)
                return Call(t.text, tuple(args), t.offset)
            raise ExprSyntaxError(f"unknown name {t.text!r}", t.offset,
                                  ["pi", "m0", "m1", *FUNCTIONS])
        self.fail(["number", "pi", "m0", "m1", "(", "-", *FUNCTIONS])


def parse(text: str) -> Node:
    return _Parser(text).parse()


def to_text(node: Node) -> str:
    """Print ``node`` fully parenthesized; ``parse(to_text(n)) == n``."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return f"{node.point}[{node.index}]"
    if isinstance(node, Neg):
        return f"(-{to_text(node.operand)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.symbol} {to_text(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({', '.join(to_text(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def variables(node: Node) -> set[tuple[str, int]]:
    if isinstance(node, Var):
        return {(node.point, node.index)}
    if isinstance(node, Neg):
        return variables(node.operand)
    if isinstance(node, BinOp):
        return variables(node.left) | variables(node.right)
    if isinstance(node, Call):
        out = set()
        for a in node.args:
            out |= variables(a)
        return out
    return set()


def check_dimension(node: Node, dim: int) -> None:
    """Reject variable indices that do not exist in a ``dim``-dimensional base."""
    for point, idx in sorted(variables(node)):
        if idx >= dim:
            raise ValueError(f"{point}[{idx}] is out of range for base dimension {dim}")


def _power(a: float, b: float, offset: int) -> float:
    if a == 0.0 and b < 0:
        raise ExprDomainError("zero raised to a negative power", offset)
    if a < 0 and not float(b).is_integer():
        raise ExprDomainError("negative base with non-integer exponent", offset)
    try:
        return math.pow(a, b)
    except OverflowError:
        raise ExprDomainError("overflow in power", offset) from None


def evaluate(node: Node, m0: Sequence[float] = (), m1: Sequence[float] = ()) -> float:
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Const):
        return math.pi
    if isinstance(node, Var):
        point = m0 if node.point == "m0" else m1
        if node.index >= len(point):
            raise ExprDomainError(f"{node.point}[{node.index}] is not bound", node.offset)
        return float(point[node.index])
    if isinstance(node, Neg):
        return -evaluate(node.operand, m0, m1)
    if isinstance(node, BinOp):
        a = evaluate(node.left, m0, m1)
        b = evaluate(node.right, m0, m1)
        if isinstance(node, Add):
            return a + b
        if isinstance(node, Sub):
            return a - b
        if isinstance(node, Mul):
            return a * b
        if isinstance(node, Div):
            if b == 0.0:
                raise ExprDomainError("division by zero", node.offset)
            return a / b
        return _power(a, b, node.offset)
    if isinstance(node, Call):
        args = [evaluate(a, m0, m1) for a in node.args]
        f = node.func
        if f == "log":
            if args[0] <= 0:
                raise ExprDomainError("log of a nonpositive number", node.offset)
            return math.log(args[0])
        if f == "exp":
            try:
                return math.exp(args[0])
            except OverflowError:
                raise ExprDomainError("overflow in exp", node.offset) from None
        if f == "pow":
            return _power(args[0], args[1], node.offset)
        if f != "abs" and not math.isfinite(args[0]):
            raise ExprDomainError(f"{f} of a non-finite number", node.offset)
        if f == "mod2pi":
            return mod2pi(args[0])
        return {"sin": math.sin, "cos": math.cos, "abs": abs}[f](args[0])
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class Expression:
    """A parsed expression bound to a base dimension."""

    text: str
    ast: Node
    dim: int

    @classmethod
    def compile(cls, text: str, dim: int) -> Expression:
        ast = parse(text)
        check_dimension(ast, dim)
        return cls(text, ast, dim)

    def __call__(self, m0: Sequence[float] = (), m1: Sequence[float] = ()) -> float:
        return evaluate(self.ast, m0, m1)
