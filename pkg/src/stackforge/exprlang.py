"""A small arithmetic expression language for user-defined frame families
r(theta, t) and parameter paths x(t), y(t).

Grammar (whitespace-insensitive)::

    expr   :=  term  (('+' | '-') term)*
    term   :=  factor (('*' | '/') factor)*
    factor :=  '-' factor  |  power
    power  :=  atom ['^' factor]            # right-associative
    atom   :=  NUMBER | 'pi' | IDENT | IDENT '(' expr [',' expr] ')'
               | '(' expr ')'

'**' is accepted as a synonym for '^'.  Functions: sin, cos, tan, exp, ln,
sqrt, abs (unary) and min, max (binary).  Angles are radians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple, Union

import numpy as np

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "ExprError",
    "ExprSyntaxError",
    "UnknownFunctionError",
    "UnboundVariableError",
    "EvalDomainError",
    "parse",
    "evaluate",
    "evaluate_array",
    "to_source",
    "compile_function",
]


class ExprError(Exception):
    """Base class for expression language errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownFunctionError(ExprSyntaxError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown function {name!r}", offset)
        self.name = name


class UnboundVariableError(ExprError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class EvalDomainError(ExprError):
    """Raised when evaluation leaves the real domain (division by zero,
    ln of a non-positive number, sqrt of a negative)."""

    def __init__(self, message: str, node: "Expr"):
        super().__init__(f"{message} in {to_source(node)}")
        self.node = node


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * / ^
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: Tuple["Expr", ...]


Expr = Union[Num, Var, Neg, BinOp, Call]

_FUNCTIONS: Dict[str, int] = {
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "exp": 1,
    "ln": 1,
    "sqrt": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<pow>\*\*|\^)
  | (?P<op>[+\-*/(),])
    """,
    re.VERBOSE,
)


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos)
        if m.lastgroup != "ws":
            kind = m.lastgroup
            text = m.group()
            if kind == "pow":
                kind, text = "op", "^"
            tokens.append((kind, text, m.start()))
        pos = m.end()
    tokens.append(("eof", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, tok_text, off = self.peek()
        if kind != "op" or tok_text != text:
            got = tok_text if kind != "eof" else "end of input"
            raise ExprSyntaxError(f"expected {text!r}, got {got!r}", off)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, off = self.peek()
        if kind != "eof":
            raise ExprSyntaxError(f"unexpected trailing input {text!r}", off)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.advance()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            op = self.advance()[1]
            left = BinOp(op, left, self.factor())
        return left

    def factor(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.advance()
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.advance()
            return BinOp("^", base, self.factor())
        return base

    def atom(self) -> Expr:
        kind, text, off = self.peek()
        if kind == "number":
            self.advance()
            return Num(float(text))
        if kind == "ident":
            self.advance()
            if self.peek()[:2] == ("op", "("):
                if text not in _FUNCTIONS:
                    raise UnknownFunctionError(text, off)
                self.expect("(")
                args = [self.expr()]
                while self.peek()[:2] == ("op", ","):
                    self.advance()
                    args.append(self.expr())
                self.expect(")")
                arity = _FUNCTIONS[text]
                if len(args) != arity:
                    raise ExprSyntaxError(
                        f"{text} expects {arity} argument{'s' if arity > 1 else ''}, "
                        f"got {len(args)}",
                        off,
                    )
                return Call(text, tuple(args))
            if text == "pi":
                return Num(math.pi)
            return Var(text)
        if kind == "op" and text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        got = text if kind != "eof" else "end of input"
        raise ExprSyntaxError(f"expected a number, variable, or '(', got {got!r}", off)


def parse(source: str) -> Expr:
    """Parse source into an AST; raises ExprSyntaxError with a byte offset."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(source).parse()


def to_source(e: Expr) -> str:
    """Fully parenthesized source form; parse(to_source(e)) == e."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_source(a) for a in e.args)})"
    raise TypeError(f"not an Expr node: {e!r}")


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate in IEEE double precision with every variable bound."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return float(bindings[e.name])
        except KeyError:
            raise UnboundVariableError(e.name) from None
    if isinstance(e, Neg):
        return -evaluate(e.arg, bindings)
    if isinstance(e, BinOp):
        a = evaluate(e.left, bindings)
        b = evaluate(e.right, bindings)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b == 0.0:
                raise EvalDomainError("division by zero", e)
            return a / b
        if e.op == "^":
            try:
                r = a**b
            except (OverflowError, ZeroDivisionError, ValueError) as err:
                raise EvalDomainError(str(err), e) from None
            if isinstance(r, complex):
                raise EvalDomainError("non-real power", e)
            return r
        raise ValueError(f"unknown operator {e.op!r}")
    if isinstance(e, Call):
        args = [evaluate(a, bindings) for a in e.args]
        if e.name == "ln":
            if args[0] <= 0.0:
                raise EvalDomainError("ln of a non-positive number", e)
            return math.log(args[0])
        if e.name == "sqrt":
            if args[0] < 0.0:
                raise EvalDomainError("sqrt of a negative number", e)
            return math.sqrt(args[0])
        if e.name == "min":
            return min(args)
        if e.name == "max":
            return max(args)
        if e.name == "abs":
            return abs(args[0])
        try:
            return getattr(math, e.name)(args[0])
        except (ValueError, OverflowError) as err:
            raise EvalDomainError(str(err), e) from None
    raise TypeError(f"not an Expr node: {e!r}")


_NP_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "min": np.minimum,
    "max": np.maximum,
}


def evaluate_array(e: Expr, bindings: Mapping[str, np.ndarray]) -> np.ndarray:
    """Vectorized evaluation over numpy arrays.

    Domain violations follow numpy semantics (nan/inf instead of raising);
    callers that need strictness should check the output for finiteness.
    """
    if isinstance(e, Num):
        return np.float64(e.value)
    if isinstance(e, Var):
        try:
            return np.asarray(bindings[e.name], dtype=np.float64)
        except KeyError:
            raise UnboundVariableError(e.name) from None
    if isinstance(e, Neg):
        return -evaluate_array(e.arg, bindings)
    if isinstance(e, BinOp):
        a = evaluate_array(e.left, bindings)
        b = evaluate_array(e.right, bindings)
        with np.errstate(all="ignore"):
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
            if e.op == "/":
                return a / b
            if e.op == "^":
                return np.power(a, b)
        raise ValueError(f"unknown operator {e.op!r}")
    if isinstance(e, Call):
        args = [evaluate_array(a, bindings) for a in e.args]
        with np.errstate(all="ignore"):
            return _NP_FUNCS[e.name](*args)
    raise TypeError(f"not an Expr node: {e!r}")


def compile_function(e: Expr, *varnames: str):
    """Wrap an AST as f(*arrays) -> array for the given variable order."""

    def fn(*values):
        return evaluate_array(e, dict(zip(varnames, values)))

    return fn
