"""Univariate real expressions: parsing, evaluation and printing.

Grammar, loosest to tightest binding::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?          # right associative
    atom  := NUMBER | 'x' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'

so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``.  Implicit
multiplication (``2x``) is rejected.

Evaluation works on Python floats, numpy arrays (elementwise) and
``mpmath.mpf`` values; the argument type selects the arithmetic.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import mpmath
import numpy as np

from .errors import DomainError, EvaluationError, ParseError

__all__ = [
    "Expr",
    "Constant",
    "Variable",
    "Unary",
    "Binary",
    "FUNCTIONS",
    "BINARY_OPS",
    "parse",
    "evaluate",
    "to_text",
    "contains_op",
]

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt", "tanh", "abs")
UNARY_OPS = ("neg",) + FUNCTIONS
BINARY_OPS = ("+", "-", "*", "/", "^")
NAMED_CONSTANTS = {"pi": math.pi, "e": math.e}


class Expr:
    """Base class of expression nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self):
        return to_text(self)

    def __call__(self, x):
        return evaluate(self, x)


@dataclass(frozen=True)
class Constant(Expr):
    value: float

    def __post_init__(self):
        v = float(self.value)
        # The parser only produces nonnegative literals; negation is a Unary node.
        if not math.isfinite(v) or v < 0:
            raise ValueError(f"constant must be finite and nonnegative, got {self.value!r}")
        object.__setattr__(self, "value", v + 0.0)


@dataclass(frozen=True)
class Variable(Expr):
    pass


@dataclass(frozen=True)
class Unary(Expr):
    op: str
    child: Expr

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise ValueError(f"unknown unary operator {self.op!r}")


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator {self.op!r}")


# --------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(source):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, pos=None):
        if pos is None:
            pos = self.tok[2]
        return ParseError(message, min(pos, max(len(self.source) - 1, 0)))

    def expect(self, text):
        kind, value, pos = self.tok
        if value != text or kind != "op":
            if kind == "end":
                raise self.error(f"expected {text!r} but input ended")
            raise self.error(f"expected {text!r}, found {value!r}")
        self.advance()

    def parse(self):
        if self.tok[0] == "end":
            raise self.error("empty expression", 0)
        node = self.expr()
        kind, value, pos = self.tok
        if kind != "end":
            if value == ")":
                raise self.error("unbalanced parenthesis ')'")
            if kind in ("number", "name") or value == "(":
                raise self.error("implicit multiplication is not supported; use '*'")
            raise self.error(f"unexpected token {value!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.advance()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.advance()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Unary("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            return Binary("^", base, self.unary())
        return base

    def atom(self):
        kind, value, pos = self.tok
        if kind == "number":
            self.advance()
            return Constant(float(value))
        if kind == "name":
            self.advance()
            if value in FUNCTIONS:
                if self.tok[1] != "(":
                    raise self.error(f"function {value!r} requires a parenthesized argument")
                self.advance()
                if self.tok[1] == ")":
                    raise self.error(f"function {value!r} takes exactly one argument")
                arg = self.expr()
                if self.tok[1] == ",":
                    raise self.error(f"function {value!r} takes exactly one argument")
                self.expect(")")
                return Unary(value, arg)
            if value == "x":
                return Variable()
            if value in NAMED_CONSTANTS:
                return Constant(NAMED_CONSTANTS[value])
            raise self.error(f"unknown identifier {value!r}", pos)
        if kind == "op" and value == "(":
            self.advance()
            if self.tok[1] == ")":
                raise self.error("empty parentheses")
            node = self.expr()
            if self.tok[0] == "end":
                raise self.error("unbalanced parenthesis: missing ')'")
            self.expect(")")
            return node
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {value!r}")


def parse(source: str) -> Expr:
    """Parse expression text into an AST.

    Raises :class:`ParseError` carrying the character position of the
    offending token.
    """
    if not isinstance(source, str):
        raise TypeError("source must be a string")
    return _Parser(source).parse()


# --------------------------------------------------------------------------
# printing


def _fmt_constant(v):
    if v.is_integer() and v < 1e16:
        return str(int(v))
    return repr(v)


def to_text(e: Expr) -> str:
    """Fully parenthesized rendering; ``parse(to_text(e)) == e``."""
    if isinstance(e, Constant):
        return _fmt_constant(e.value)
    if isinstance(e, Variable):
        return "x"
    if isinstance(e, Unary):
        if e.op == "neg":
            return f"(-{to_text(e.child)})"
        return f"{e.op}({to_text(e.child)})"
    if isinstance(e, Binary):
        return f"({to_text(e.left)} {e.op} {to_text(e.right)})"
    raise TypeError(f"not an expression node: {e!r}")


def contains_op(e: Expr, op: str) -> bool:
    if isinstance(e, Unary):
        return e.op == op or contains_op(e.child, op)
    if isinstance(e, Binary):
        return e.op == op or contains_op(e.left, op) or contains_op(e.right, op)
    return False


def integer_exponent(node):
    """Return the integer value of a constant integer exponent node, else None."""
    sign = 1
    if isinstance(node, Unary) and node.op == "neg":
        sign, node = -1, node.child
    if isinstance(node, Constant) and node.value.is_integer():
        return sign * int(node.value)
    return None


# --------------------------------------------------------------------------
# evaluation


class _FloatOps:
    sin = staticmethod(math.sin)
    cos = staticmethod(math.cos)
    tanh = staticmethod(math.tanh)
    abs = staticmethod(abs)

    @staticmethod
    def exp(v):
        try:
            return math.exp(v)
        except OverflowError:
            return math.inf

    @staticmethod
    def log(v):
        return math.log(v)

    @staticmethod
    def sqrt(v):
        return math.sqrt(v)

    @staticmethod
    def any(mask):
        return bool(mask)

    @staticmethod
    def where_pos(base, exponent):
        return base**exponent if base > 0 else 0.0

    @staticmethod
    def isfinite(v):
        return math.isfinite(v)


class _ArrayOps:
    sin = staticmethod(np.sin)
    cos = staticmethod(np.cos)
    tanh = staticmethod(np.tanh)
    abs = staticmethod(np.abs)
    exp = staticmethod(np.exp)
    log = staticmethod(np.log)
    sqrt = staticmethod(np.sqrt)

    @staticmethod
    def any(mask):
        return bool(np.any(mask))

    @staticmethod
    def where_pos(base, exponent):
        safe = np.where(base > 0, base, 1.0)
        return np.where(base > 0, safe**exponent, 0.0)

    @staticmethod
    def isfinite(v):
        return bool(np.all(np.isfinite(v)))


class _MpOps:
    sin = staticmethod(mpmath.sin)
    cos = staticmethod(mpmath.cos)
    tanh = staticmethod(mpmath.tanh)
    abs = staticmethod(abs)
    exp = staticmethod(mpmath.exp)
    log = staticmethod(mpmath.log)
    sqrt = staticmethod(mpmath.sqrt)

    @staticmethod
    def any(mask):
        return bool(mask)

    @staticmethod
    def where_pos(base, exponent):
        return mpmath.power(base, exponent) if base > 0 else mpmath.mpf(0)

    @staticmethod
    def isfinite(v):
        return mpmath.isfinite(v)


def _eval(node, x, ops):
    if isinstance(node, Variable):
        return x
    if isinstance(node, Constant):
        return node.value
    if isinstance(node, Unary):
        v = _eval(node.child, x, ops)
        op = node.op
        if op == "neg":
            return -v
        if op == "log" and ops.any(v <= 0):
            raise DomainError("log of a nonpositive value", node)
        if op == "sqrt" and ops.any(v < 0):
            raise DomainError("sqrt of a negative value", node)
        return getattr(ops, op)(v)
    if isinstance(node, Binary):
        left = _eval(node.left, x, ops)
        right = _eval(node.right, x, ops)
        op = node.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            if ops.any(right == 0):
                raise DomainError("division by zero", node)
            return left / right
        n = integer_exponent(node.right)
        if n is not None:
            if n < 0 and ops.any(left == 0):
                raise DomainError("zero raised to a negative power", node)
            if n < 0:
                return 1 / left ** (-n)
            return left ** n
        # non-integer or non-constant exponent: nonnegative-base contract
        if ops.any(left < 0):
            raise DomainError("negative base with non-integer exponent", node)
        if ops.any((left == 0) & (right <= 0)):
            raise DomainError("zero base with nonpositive exponent", node)
        return ops.where_pos(left, right)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(e: Expr, x):
    """Evaluate ``e`` at ``x``.

    ``x`` may be a float, a numpy array (evaluated elementwise) or an
    ``mpmath.mpf`` (evaluated at the current mpmath working precision).
    Raises :class:`DomainError` naming the offending subexpression and
    :class:`EvaluationError` when the result is not finite.
    """
    if isinstance(x, np.ndarray):
        ops = _ArrayOps
        x = x.astype(float, copy=False)
        with np.errstate(all="ignore"):
            value = _eval(e, x, ops)
        value = np.broadcast_to(np.asarray(value, dtype=float), x.shape)
    elif isinstance(x, mpmath.mpf):
        ops = _MpOps
        value = _eval(e, x, ops)
        if not isinstance(value, mpmath.mpf):
            value = mpmath.mpf(value)
    else:
        ops = _FloatOps
        try:
            value = float(_eval(e, float(x), ops))
        except OverflowError:
            value = math.inf
    if not ops.isfinite(value):
        raise EvaluationError(f"non-finite value evaluating {to_text(e)}")
    return value
