"""Small arithmetic expression language for immersions and vector fields.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | factor
    factor := base ("^" integer)?
    base   := number | variable | ident "(" expr ")" | "(" expr ")"

with ``ident`` one of sin, cos, exp, log, sqrt.  The variable names default to
``u`` and ``v``; hypersurface graphs are parsed with ``x``, ``y``, ``z``.
Trees evaluate on floats, numpy arrays and :class:`~equiaffine.jets.Jet`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import DomainError, ParseError, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")
SURFACE_VARIABLES = ("u", "v")
SPACE_VARIABLES = ("x", "y", "z")


# -- syntax tree -------------------------------------------------------------

class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    name: str


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class BinOp(Node):
    op: str
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: int


@dataclass(frozen=True)
class Call(Node):
    func: str
    arg: Node


# -- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos),
                             ("number", "identifier", "(", "-"), text)
        kind = m.lastgroup
        if kind != "ws":
            toks.append(_Tok(kind if kind != "op" else m.group(), m.group(), pos))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, variables):
        self.text = text
        self.variables = tuple(variables)
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, expected):
        tok = self.tok
        what = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {what}", _byte_offset(self.text, tok.pos), expected, self.text)

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.error(("+", "-", "*", "/", "^", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.tok.kind
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self.tok.kind
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.kind == "-":
            self.i += 1
            return Neg(self.unary())
        return self.factor()

    def factor(self) -> Node:
        node = self.base()
        if self.tok.kind == "^":
            self.i += 1
            tok = self.tok
            if tok.kind != "number" or not tok.text.isdigit():
                self.error(("integer",))
            self.i += 1
            node = Pow(node, int(tok.text))
        return node

    def base(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "ident":
            if tok.text in self.variables:
                self.i += 1
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                self.i += 1
                if self.tok.kind != "(":
                    self.error(("(",))
                self.i += 1
                arg = self.expr()
                if self.tok.kind != ")":
                    self.error((")", "+", "-", "*", "/", "^"))
                self.i += 1
                return Call(tok.text, arg)
            raise UnknownIdentifier(tok.text, _byte_offset(self.text, tok.pos))
        if tok.kind == "(":
            self.i += 1
            node = self.expr()
            if self.tok.kind != ")":
                self.error((")", "+", "-", "*", "/", "^"))
            self.i += 1
            return node
        self.error(("number", "identifier", "(", "-") + self.variables)


def parse(text: str, variables=SURFACE_VARIABLES) -> Node:
    """Parse one expression; raises ParseError or UnknownIdentifier."""
    return _Parser(text, variables).parse()


# -- printer -----------------------------------------------------------------

def _prec(node: Node) -> int:
    if isinstance(node, BinOp):
        return 1 if node.op in "+-" else 2
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _fmt_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def to_text(node: Node) -> str:
    """Print a tree so that parsing the text gives back the same tree."""
    if isinstance(node, Num):
        if node.value < 0:
            return f"(-{_fmt_number(-node.value)})"
        return _fmt_number(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 5 or (isinstance(node.base, Num) and node.base.value < 0):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Neg):
        arg = to_text(node.arg)
        return f"-({arg})" if _prec(node.arg) < 3 else f"-{arg}"
    if isinstance(node, BinOp):
        p = _prec(node)
        left = to_text(node.left)
        right = to_text(node.right)
        if _prec(node.left) < p:
            left = f"({left})"
        if _prec(node.right) <= p:
            right = f"({right})"
        return f"{left}{node.op}{right}"
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation --------------------------------------------------------------

_FUNC_IMPL = {"sin": jets.sin, "cos": jets.cos, "exp": jets.exp, "log": jets.log, "sqrt": jets.sqrt}


def evaluate(node: Node, env: dict):
    """Evaluate on floats, arrays or jets; evaluation faults raise DomainError."""
    try:
        with np.errstate(divide="raise", invalid="raise", over="raise"):
            return _eval(node, env)
    except (ZeroDivisionError, FloatingPointError, OverflowError) as exc:
        raise DomainError(str(exc)) from exc


def _eval(node, env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.arg, env)
    if isinstance(node, BinOp):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if not isinstance(b, jets.Jet) and np.any(np.asarray(b) == 0):
            raise DomainError("division by zero")
        return a / b
    if isinstance(node, Pow):
        base = _eval(node.base, env)
        if isinstance(base, jets.Jet):
            return base ** node.exponent
        return np.asarray(base, dtype=float) ** node.exponent
    if isinstance(node, Call):
        return _FUNC_IMPL[node.func](_eval(node.arg, env))
    raise TypeError(f"not an expression node: {node!r}")


def variables(node: Node) -> set[str]:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Num):
        return set()
    if isinstance(node, (Neg, Call)):
        return variables(node.arg)
    if isinstance(node, Pow):
        return variables(node.base)
    return variables(node.left) | variables(node.right)


# -- construction helpers with light simplification --------------------------

ZERO = Num(0.0)
ONE = Num(1.0)


def num(x: float) -> Node:
    x = float(x)
    return Neg(Num(-x)) if x < 0 else Num(x)


def _is_num(node, value=None):
    if isinstance(node, Num):
        return value is None or node.value == value
    return False


def add(a: Node, b: Node) -> Node:
    if _is_num(a, 0.0):
        return b
    if _is_num(b, 0.0):
        return a
    return BinOp("+", a, b)


def sub(a: Node, b: Node) -> Node:
    if _is_num(b, 0.0):
        return a
    if _is_num(a, 0.0):
        return neg(b)
    return BinOp("-", a, b)


def neg(a: Node) -> Node:
    if _is_num(a, 0.0):
        return a
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a: Node, b: Node) -> Node:
    if _is_num(a, 0.0) or _is_num(b, 0.0):
        return ZERO
    if _is_num(a, 1.0):
        return b
    if _is_num(b, 1.0):
        return a
    if isinstance(a, Neg):
        return neg(mul(a.arg, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.arg))
    return BinOp("*", a, b)


def div(a: Node, b: Node) -> Node:
    if _is_num(a, 0.0):
        return ZERO
    if _is_num(b, 1.0):
        return a
    return BinOp("/", a, b)


def power(a: Node, n: int) -> Node:
    if n == 0:
        return ONE
    if n == 1:
        return a
    if n < 0:
        return div(ONE, power(a, -n))
    return Pow(a, n)


def diff(node: Node, var: str) -> Node:
    """Symbolic partial derivative with respect to ``var``."""
    if isinstance(node, Num):
        return ZERO
    if isinstance(node, Var):
        return ONE if node.name == var else ZERO
    if isinstance(node, Neg):
        return neg(diff(node.arg, var))
    if isinstance(node, BinOp):
        a, b = node.left, node.right
        da, db = diff(a, var), diff(b, var)
        if node.op == "+":
            return add(da, db)
        if node.op == "-":
            return sub(da, db)
        if node.op == "*":
            return add(mul(da, b), mul(a, db))
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if isinstance(node, Pow):
        n = node.exponent
        return mul(mul(num(n), power(node.base, n - 1)), diff(node.base, var))
    if isinstance(node, Call):
        a = node.arg
        da = diff(a, var)
        if node.func == "sin":
            outer = Call("cos", a)
        elif node.func == "cos":
            outer = neg(Call("sin", a))
        elif node.func == "exp":
            outer = node
        elif node.func == "log":
            return div(da, a)
        else:
            return div(da, mul(Num(2.0), node))
        return mul(outer, da)
    raise TypeError(f"not an expression node: {node!r}")


def substitute(node: Node, mapping: dict) -> Node:
    """Replace variables by trees."""
    if isinstance(node, Var):
        return mapping.get(node.name, node)
    if isinstance(node, Num):
        return node
    if isinstance(node, Neg):
        return Neg(substitute(node.arg, mapping))
    if isinstance(node, Call):
        return Call(node.func, substitute(node.arg, mapping))
    if isinstance(node, Pow):
        return Pow(substitute(node.base, mapping), node.exponent)
    return BinOp(node.op, substitute(node.left, mapping), substitute(node.right, mapping))
