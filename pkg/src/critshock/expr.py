"""One-variable expression language with exact derivative jets.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | 'pi' | IDENT | FUNC '(' expr ')' | '(' expr ')'

Functions: sin, cos, exp, log, atan, sqrt.  Exponents are restricted to
non-negative integer literals, so ``x^2`` is fine but ``x^0.5`` is not
(write ``sqrt(x)`` or ``exp(0.5*log(x))`` instead).

Evaluation works on floats or numpy arrays.  :func:`eval_jet` propagates
truncated Taylor series through the tree, giving derivatives up to order 4
that are exact up to rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

from .errors import CritShockError

__all__ = [
    "Num", "Const", "Var", "Neg", "BinOp", "Pow", "Call", "Expression",
    "ParseError", "DomainError", "Jet", "FUNCTIONS", "MAX_ORDER",
    "parse", "to_source", "evaluate", "eval_jet",
]

MAX_ORDER = 4
FUNCTIONS = ("sin", "cos", "exp", "log", "atan", "sqrt")


class ParseError(CritShockError):
    """Syntax error at a byte offset of the source text."""

    def __init__(self, message: str, offset: int, source: str = ""):
        self.offset = offset
        self.source = source
        super().__init__(f"{message} (at offset {offset})")


class DomainError(CritShockError):
    """Expression evaluated outside its real domain."""

    def __init__(self, message: str, node: "Expression"):
        self.node = node
        super().__init__(f"{message} in '{to_source(node)}'")


# -- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str  # only "pi"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expression"


Expression = Union[Num, Const, Var, Neg, BinOp, Pow, Call]


# -- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.lastgroup is None:
            raise ParseError(f"unexpected character {source[pos]!r}", _byte_offset(source, pos), source)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), _byte_offset(source, start)))
        pos = m.end()
    tokens.append(("end", "", _byte_offset(source, n)))
    return tokens


def _byte_offset(source: str, char_pos: int) -> int:
    return len(source[:char_pos].encode("utf-8"))


class _Parser:
    def __init__(self, source: str, variable: str | None):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.variable = variable

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, expected: str, tok=None):
        kind, text, offset = tok or self.peek()
        found = "end of input" if kind == "end" else repr(text)
        raise ParseError(f"expected {expected}, found {found}", offset, self.source)

    def parse(self) -> Expression:
        node = self.expr()
        if self.peek()[0] != "end":
            self.error("operator or end of input")
        return node

    def expr(self) -> Expression:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.advance()
            kind, text, offset = self.peek()
            if kind != "num" or not re.fullmatch(r"\d+", text):
                raise ParseError("exponent must be a non-negative integer literal", offset, self.source)
            self.advance()
            return Pow(base, int(text))
        return base

    def atom(self) -> Expression:
        kind, text, offset = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(text))
        if kind == "ident":
            self.advance()
            if text in FUNCTIONS:
                if not (self.peek()[0] == "op" and self.peek()[1] == "("):
                    self.error(f"'(' after function name {text!r}")
                self.advance()
                arg = self.expr()
                self.expect_close()
                return Call(text, arg)
            if text == "pi":
                return Const("pi")
            if self.variable is None:
                self.variable = text
            elif text != self.variable:
                raise ParseError(
                    f"unknown identifier {text!r} (free variable is {self.variable!r})",
                    offset, self.source)
            return Var(text)
        if kind == "op" and text == "(":
            self.advance()
            node = self.expr()
            self.expect_close()
            return node
        self.error("number, identifier or '('")

    def expect_close(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == ")":
            self.advance()
            return
        if kind == "end":
            self.error("')' to close parenthesis")
        self.error("')'")


def parse(source: str, variable: str | None = None) -> Expression:
    """Parse ``source`` into an expression tree.

    If ``variable`` is given it is the only identifier accepted as the free
    variable; otherwise the first non-reserved identifier becomes it.
    """
    if not source or not source.strip():
        raise ParseError("empty expression", 0, source)
    return _Parser(source, variable).parse()


def to_source(e: Expression) -> str:
    """Pretty-print with enough parentheses that re-parsing gives the same tree."""
    if isinstance(e, Num):
        return repr(float(e.value))
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Pow):
        return f"({to_source(e.base)} ^ {e.exponent})"
    if isinstance(e, Call):
        return f"{e.func}({to_source(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def free_variable(e: Expression) -> str | None:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, (Num, Const)):
        return None
    if isinstance(e, Neg):
        return free_variable(e.operand)
    if isinstance(e, BinOp):
        return free_variable(e.left) or free_variable(e.right)
    if isinstance(e, Pow):
        return free_variable(e.base)
    return free_variable(e.arg)


# -- plain evaluation --------------------------------------------------------

def _check(cond, message, node):
    if np.any(cond):
        raise DomainError(message, node)


def evaluate(e: Expression, x):
    """Value of ``e`` at ``x`` (float or numpy array)."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Const):
        return math.pi
    if isinstance(e, Neg):
        return -evaluate(e.operand, x)
    if isinstance(e, BinOp):
        lhs = evaluate(e.left, x)
        rhs = evaluate(e.right, x)
        if e.op == "+":
            return lhs + rhs
        if e.op == "-":
            return lhs - rhs
        if e.op == "*":
            return lhs * rhs
        _check(np.asarray(rhs) == 0, "division by zero", e)
        return lhs / rhs
    if isinstance(e, Pow):
        return evaluate(e.base, x) ** e.exponent
    arg = evaluate(e.arg, x)
    if e.func == "log":
        _check(np.asarray(arg) <= 0, "log of non-positive value", e)
    elif e.func == "sqrt":
        _check(np.asarray(arg) < 0, "sqrt of negative value", e)
    return getattr(np, "arctan" if e.func == "atan" else e.func)(arg)


# -- jets --------------------------------------------------------------------

class Jet:
    """Value and derivatives ``(f, f', ..., f^(k))`` at one expansion point.

    Internally stores normalized Taylor coefficients ``f^(j)/j!``; each
    coefficient may be a float or a numpy array (pointwise jets).
    """

    __slots__ = ("_t",)

    def __init__(self, taylor):
        self._t = tuple(taylor)

    @classmethod
    def from_derivatives(cls, derivs) -> "Jet":
        return cls(d / math.factorial(k) for k, d in enumerate(derivs))

    @classmethod
    def constant(cls, value, order: int) -> "Jet":
        return cls((value,) + (0.0,) * order)

    @classmethod
    def variable(cls, point, order: int) -> "Jet":
        if order == 0:
            return cls((point,))
        return cls((point, 1.0) + (0.0,) * (order - 1))

    @property
    def order(self) -> int:
        return len(self._t) - 1

    @property
    def coefficients(self) -> tuple:
        """Derivatives ``d^k f`` for k = 0..order."""
        return tuple(c * math.factorial(k) for k, c in enumerate(self._t))

    @property
    def taylor(self) -> tuple:
        return self._t

    @property
    def value(self):
        return self._t[0]

    def __getitem__(self, k: int):
        return self._t[k] * math.factorial(k)

    def __len__(self) -> int:
        return len(self._t)

    def __iter__(self):
        return iter(self.coefficients)

    def __repr__(self) -> str:
        return f"Jet({self.coefficients!r})"

    def __add__(self, other: "Jet") -> "Jet":
        return Jet(a + b for a, b in zip(self._t, other._t))

    def __sub__(self, other: "Jet") -> "Jet":
        return Jet(a - b for a, b in zip(self._t, other._t))

    def __neg__(self) -> "Jet":
        return Jet(-a for a in self._t)

    def __mul__(self, other: "Jet") -> "Jet":
        a, b = self._t, other._t
        return Jet(sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(len(a)))

    def __truediv__(self, other: "Jet") -> "Jet":
        a, b = self._t, other._t
        c = []
        for k in range(len(a)):
            s = a[k]
            for j in range(1, k + 1):
                s = s - b[j] * c[k - j]
            c.append(s / b[0])
        return Jet(c)

    def __pow__(self, n: int) -> "Jet":
        if n == 0:
            return Jet.constant(1.0, self.order)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # elementary functions; each uses the standard power-series recurrences

    def exp(self) -> "Jet":
        a = self._t
        e = [np.exp(a[0])]
        for k in range(1, len(a)):
            e.append(sum(j * a[j] * e[k - j] for j in range(1, k + 1)) / k)
        return Jet(e)

    def log(self) -> "Jet":
        a = self._t
        out = [np.log(a[0])]
        for k in range(1, len(a)):
            s = a[k] - sum(j * out[j] * a[k - j] for j in range(1, k)) / k
            out.append(s / a[0])
        return Jet(out)

    def sincos(self) -> tuple["Jet", "Jet"]:
        a = self._t
        s = [np.sin(a[0])]
        c = [np.cos(a[0])]
        for k in range(1, len(a)):
            s.append(sum(j * a[j] * c[k - j] for j in range(1, k + 1)) / k)
            c.append(-sum(j * a[j] * s[k - j] for j in range(1, k + 1)) / k)
        return Jet(s), Jet(c)

    def sqrt(self) -> "Jet":
        a = self._t
        r = [np.sqrt(a[0])]
        for k in range(1, len(a)):
            s = a[k] - sum(r[j] * r[k - j] for j in range(1, k))
            r.append(s / (2 * r[0]))
        return Jet(r)

    def atan(self) -> "Jet":
        a = self._t
        q = (Jet.constant(1.0, self.order) + self * self)._t
        d = [np.arctan(a[0])]
        for k in range(1, len(a)):
            s = k * a[k] - sum(j * d[j] * q[k - j] for j in range(1, k))
            d.append(s / (k * q[0]))
        return Jet(d)


def _jet(e: Expression, point, order: int) -> Jet:
    if isinstance(e, Num):
        return Jet.constant(e.value, order)
    if isinstance(e, Const):
        return Jet.constant(math.pi, order)
    if isinstance(e, Var):
        return Jet.variable(point, order)
    if isinstance(e, Neg):
        return -_jet(e.operand, point, order)
    if isinstance(e, BinOp):
        lhs = _jet(e.left, point, order)
        rhs = _jet(e.right, point, order)
        if e.op == "+":
            return lhs + rhs
        if e.op == "-":
            return lhs - rhs
        if e.op == "*":
            return lhs * rhs
        _check(np.asarray(rhs.value) == 0, "division by zero", e)
        return lhs / rhs
    if isinstance(e, Pow):
        return _jet(e.base, point, order) ** e.exponent
    arg = _jet(e.arg, point, order)
    v = np.asarray(arg.value)
    if e.func == "sin":
        return arg.sincos()[0]
    if e.func == "cos":
        return arg.sincos()[1]
    if e.func == "exp":
        return arg.exp()
    if e.func == "atan":
        return arg.atan()
    if e.func == "log":
        _check(v <= 0, "log of non-positive value", e)
        return arg.log()
    # sqrt: derivatives blow up at 0
    _check(v < 0 if order == 0 else v <= 0, "sqrt outside its domain", e)
    return arg.sqrt()


def eval_jet(e: Expression | str, point, order: int) -> Jet:
    """Jet of ``e`` at ``point``: coefficient k is the exact k-th derivative."""
    if isinstance(e, str):
        e = parse(e)
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"jet order must be in [0, {MAX_ORDER}], got {order}")
    return _jet(e, point, order)


def compose(outer: Jet, inner: Jet) -> Jet:
    """Jet of ``g(h(x))`` given the jet of g at h(x) and the jet of h at x.

    ``outer`` holds derivatives of g with respect to its own argument.
    """
    order = min(outer.order, inner.order)
    shift = Jet((0.0,) + inner.taylor[1:order + 1])
    terms = [Jet.constant(outer.taylor[k], order) * (shift ** k) for k in range(order + 1)]
    return reduce(lambda p, q: p + q, terms)
