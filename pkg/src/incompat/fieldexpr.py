"""Scalar field expressions: grammar, parser, pretty-printer, jet evaluation.

Grammar (EBNF):

    expr    = term { ("+" | "-") term } ;
    term    = factor { ("*" | "/") factor } ;
    factor  = "-" factor | power ;
    power   = atom [ "^" [ "-" ] integer ] ;
    atom    = number | "pi" | variable | function "(" expr ")" | "(" expr ")" ;

Variables depend on context: bulk fields use x1,x2,x3; surface fields u,v;
curve fields s.  Functions: sin, cos, exp, tanh.  Powers are integer only.
Parse errors carry the byte offset of the offending token.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .jets import Jet

FUNCTIONS = ("sin", "cos", "exp", "tanh")

BULK_VARS = ("x1", "x2", "x3")
SURFACE_VARS = ("u", "v")
CURVE_VARS = ("s",)


class ParseError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class EvalDomainError(ValueError):
    """Raised when evaluating a field produces non-finite values."""


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg' or a function name
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # '+', '-', '*', '/'
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Power:
    base: "Node"
    exponent: int


Node = Const | Var | Unary | Binary | Power


# -- tokenizer ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\^|\+|-|\*|/|\(|\)))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            off = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", off)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.variables = variables
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op: str):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", off)
        return self.take()

    def parse(self) -> Node:
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", off)
        return node

    def expr(self) -> Node:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                node = Binary(val, node, self.term())
            else:
                return node

    def term(self) -> Node:
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                node = Binary(val, node, self.factor())
            else:
                return node

    def factor(self) -> Node:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Unary("neg", self.factor())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val, off = self.peek()
            if kind == "op" and val == "-":
                self.take()
                sign = -1
                kind, val, off = self.peek()
            if kind != "num" or any(c in val for c in ".eE"):
                raise ParseError("exponent must be an integer literal", off)
            self.take()
            return Power(base, sign * int(val))
        return base

    def atom(self) -> Node:
        kind, val, off = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if val == "pi":
                return Const(math.pi)
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Unary(val, arg)
            if val in self.variables:
                return Var(val)
            raise ParseError(
                f"unknown identifier {val!r} (variables here: {', '.join(self.variables)})", off
            )
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", off)


def parse_field(text: str, variables: tuple[str, ...] = BULK_VARS) -> Node:
    """Parse an expression over the given variable set into an AST."""
    return _Parser(text, variables).parse()


# -- pretty printer ----------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "pow": 4, "atom": 5}


def _prec(node: Node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _PREC["neg"] if node.op == "neg" else _PREC["atom"]
    if isinstance(node, Power):
        return _PREC["pow"]
    return _PREC["atom"]


def pretty(node: Node) -> str:
    """Render with minimal parentheses; parse(pretty(n)) == n."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            inner = pretty(node.arg)
            if _prec(node.arg) < _PREC["neg"]:
                inner = f"({inner})"
            return f"-{inner}"
        return f"{node.op}({pretty(node.arg)})"
    if isinstance(node, Power):
        base = pretty(node.base)
        if _prec(node.base) <= _PREC["pow"]:
            base = f"({base})"
        exp = str(node.exponent) if node.exponent >= 0 else f"-{-node.exponent}"
        return f"{base}^{exp}"
    assert isinstance(node, Binary)
    lhs, rhs = pretty(node.left), pretty(node.right)
    p = _PREC[node.op]
    if _prec(node.left) < p:
        lhs = f"({lhs})"
    # binary ops parse left-associative: an equal-precedence right operand
    # must keep its parens for the round trip to preserve tree shape
    if _prec(node.right) <= p:
        rhs = f"({rhs})"
    # guard '1 + -2' style output
    if rhs.startswith("-"):
        rhs = f"({rhs})"
    return f"{lhs} {node.op} {rhs}"


# -- tape compilation --------------------------------------------------------


class Tape:
    """Flat instruction list over a register file, shared-subtree deduplicated."""

    def __init__(self, variables: tuple[str, ...]):
        self.variables = variables
        self.instructions: list[tuple] = []  # (op, *operand register ids / immediates)
        self._memo: dict[Node, int] = {}

    def _emit(self, instr) -> int:
        self.instructions.append(instr)
        return len(self.instructions) - 1

    def add(self, node: Node) -> int:
        if node in self._memo:
            return self._memo[node]
        if isinstance(node, Const):
            reg = self._emit(("const", node.value))
        elif isinstance(node, Var):
            reg = self._emit(("var", self.variables.index(node.name)))
        elif isinstance(node, Unary):
            reg = self._emit((node.op, self.add(node.arg)))
        elif isinstance(node, Power):
            reg = self._emit(("pow", self.add(node.base), node.exponent))
        else:
            reg = self._emit((node.op, self.add(node.left), self.add(node.right)))
        self._memo[node] = reg
        return reg


def compile_tape(node: Node, variables: tuple[str, ...] = BULK_VARS) -> Tape:
    tape = Tape(variables)
    tape.add(node)
    return tape


def eval_tape(tape: Tape, var_jets: list[Jet], check: bool = True) -> Jet:
    """Run a tape with jet-valued variables; returns the result jet.

    `var_jets` supplies one jet per context variable (any consistent nvars /
    order / batch shape).  Non-finite results raise EvalDomainError when
    `check` is set.
    """
    ref = var_jets[0]
    regs: list[Jet] = []
    for instr in tape.instructions:
        op = instr[0]
        if op == "const":
            regs.append(Jet.const(instr[1], ref.nvars, ref.order, ref.shape))
        elif op == "var":
            regs.append(var_jets[instr[1]])
        elif op == "neg":
            regs.append(-regs[instr[1]])
        elif op == "pow":
            regs.append(regs[instr[1]] ** instr[2])
        elif op == "+":
            regs.append(regs[instr[1]] + regs[instr[2]])
        elif op == "-":
            regs.append(regs[instr[1]] - regs[instr[2]])
        elif op == "*":
            regs.append(regs[instr[1]] * regs[instr[2]])
        elif op == "/":
            regs.append(regs[instr[1]] / regs[instr[2]])
        elif op == "sin":
            regs.append(regs[instr[1]].sin())
        elif op == "cos":
            regs.append(regs[instr[1]].cos())
        elif op == "exp":
            regs.append(regs[instr[1]].exp())
        elif op == "tanh":
            regs.append(regs[instr[1]].tanh())
        else:  # pragma: no cover
            raise AssertionError(f"unknown op {op}")
    out = regs[-1]
    if check and not np_isfinite_all(out):
        raise EvalDomainError("field evaluation produced non-finite values")
    return out


def np_isfinite_all(jet: Jet) -> bool:
    import numpy as np

    return bool(np.isfinite(jet.coef).all())
