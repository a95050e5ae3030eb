"""Truncated Taylor arithmetic ("jets") for exact derivatives of expressions.

A jet of order ``m`` at ``x0`` holds the normalized coefficients
``f^(j)(x0) / j!`` for ``j = 0..m``.  Storing normalized coefficients keeps
magnitudes reasonable up to the order cap.  The expansion point may be a
numpy array, in which case every coefficient is an array of the same shape
and all recurrences act elementwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonSmoothError, OrderLimitError
from .expr import Binary, Constant, Expr, Unary, Variable, contains_op, integer_exponent

MAX_ORDER = 32

__all__ = ["Jet", "MAX_ORDER", "eval_jet", "derivative", "derivatives"]


@dataclass(frozen=True, eq=False)
class Jet:
    base: float | np.ndarray
    coeffs: np.ndarray

    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    def derivative(self, j):
        """Return ``f^(j)(base)``, rescaling the stored coefficient by ``j!``."""
        v = self.coeffs[j] * math.factorial(j)
        return float(v) if np.ndim(v) == 0 else v

    def derivatives(self):
        fact = np.array([math.factorial(j) for j in range(self.order + 1)], dtype=float)
        return self.coeffs * fact.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))

    # -- arithmetic ------------------------------------------------------
    def _wrap(self, coeffs):
        return Jet(self.base, coeffs)

    def _lift(self, other):
        if isinstance(other, Jet):
            return other.coeffs
        c = np.zeros_like(self.coeffs)
        c[0] = other
        return c

    def __add__(self, other):
        return self._wrap(self.coeffs + self._lift(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._wrap(self.coeffs - self._lift(other))

    def __rsub__(self, other):
        return self._wrap(self._lift(other) - self.coeffs)

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self._wrap(self.coeffs * other)
        return self._wrap(_cauchy(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self._wrap(self.coeffs / other)
        return self._wrap(_divide(self.coeffs, other.coeffs))

    def __rtruediv__(self, other):
        return self._wrap(_divide(self._lift(other), self.coeffs))

    def exp(self):
        return self._wrap(_exp(self.coeffs))


def _cauchy(a, b):
    m = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for n in range(m):
        acc = a[0] * b[n]
        for j in range(1, n + 1):
            acc = acc + a[j] * b[n - j]
        out[n] = acc
    return out


def _divide(a, b, node=None):
    if np.any(b[0] == 0):
        raise DomainError("division by zero", node)
    m = a.shape[0]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape))
    for n in range(m):
        acc = a[n]
        for j in range(1, n + 1):
            acc = acc - b[j] * out[n - j]
        out[n] = acc / b[0]
    return out


def _exp(a):
    out = np.zeros_like(a)
    out[0] = np.exp(a[0])
    for n in range(1, a.shape[0]):
        acc = 0.0
        for j in range(1, n + 1):
            acc = acc + j * a[j] * out[n - j]
        out[n] = acc / n
    return out


def _log(a, node=None):
    if np.any(a[0] <= 0):
        raise DomainError("log of a nonpositive value", node)
    out = np.zeros_like(a)
    out[0] = np.log(a[0])
    for n in range(1, a.shape[0]):
        acc = 0.0
        for j in range(1, n):
            acc = acc + j * out[j] * a[n - j]
        out[n] = (a[n] - acc / n) / a[0]
    return out


def _sqrt(a, node=None):
    # sqrt is singular at 0 for every positive order
    if np.any(a[0] < 0) or (a.shape[0] > 1 and np.any(a[0] == 0)):
        raise DomainError("sqrt at a nonpositive value", node)
    out = np.zeros_like(a)
    out[0] = np.sqrt(a[0])
    for n in range(1, a.shape[0]):
        acc = 0.0
        for j in range(1, n):
            acc = acc + out[j] * out[n - j]
        out[n] = (a[n] - acc) / (2 * out[0])
    return out


def _sincos(a):
    s = np.zeros_like(a)
    c = np.zeros_like(a)
    s[0] = np.sin(a[0])
    c[0] = np.cos(a[0])
    for n in range(1, a.shape[0]):
        acc_s = 0.0
        acc_c = 0.0
        for j in range(1, n + 1):
            acc_s = acc_s + j * a[j] * c[n - j]
            acc_c = acc_c + j * a[j] * s[n - j]
        s[n] = acc_s / n
        c[n] = -acc_c / n
    return s, c


def _tanh(a):
    # t' = (1 - t^2) a'; u = 1 - t^2 is built alongside t
    t = np.zeros_like(a)
    u = np.zeros_like(a)
    t[0] = np.tanh(a[0])
    u[0] = 1 - t[0] * t[0]
    for n in range(1, a.shape[0]):
        acc = 0.0
        for j in range(1, n + 1):
            acc = acc + j * a[j] * u[n - j]
        t[n] = acc / n
        sq = 0.0
        for i in range(n + 1):
            sq = sq + t[i] * t[n - i]
        u[n] = -sq
    return t, u


def _int_power(a, n):
    if n == 0:
        out = np.zeros_like(a)
        out[0] = 1.0
        return out
    result = None
    base = a
    k = abs(n)
    while k:
        if k & 1:
            result = base if result is None else _cauchy(result, base)
        k >>= 1
        if k:
            base = _cauchy(base, base)
    return result


def _jet(node, x0, m, shape):
    if isinstance(node, Variable):
        c = np.zeros((m + 1,) + shape)
        c[0] = x0
        if m >= 1:
            c[1] = 1.0
        return c
    if isinstance(node, Constant):
        c = np.zeros((m + 1,) + shape)
        c[0] = node.value
        return c
    if isinstance(node, Unary):
        a = _jet(node.child, x0, m, shape)
        op = node.op
        if op == "neg":
            return -a
        if op == "exp":
            return _exp(a)
        if op == "log":
            return _log(a, node)
        if op == "sqrt":
            return _sqrt(a, node)
        if op == "sin":
            return _sincos(a)[0]
        if op == "cos":
            return _sincos(a)[1]
        if op == "tanh":
            return _tanh(a)[0]
        raise NonSmoothError(f"{op} is not differentiable")
    if isinstance(node, Binary):
        a = _jet(node.left, x0, m, shape)
        op = node.op
        if op == "^":
            n = integer_exponent(node.right)
            if n is not None:
                if n < 0:
                    if np.any(a[0] == 0):
                        raise DomainError("zero raised to a negative power", node)
                    one = np.zeros_like(a)
                    one[0] = 1.0
                    return _divide(one, _int_power(a, -n), node)
                return _int_power(a, n)
            b = _jet(node.right, x0, m, shape)
            if np.any(a[0] <= 0):
                raise DomainError("power with nonpositive base is not smooth", node)
            return _exp(_cauchy(b, _log(a, node)))
        b = _jet(node.right, x0, m, shape)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return _cauchy(a, b)
        if op == "/":
            return _divide(a, b, node)
    raise TypeError(f"not an expression node: {node!r}")


def eval_jet(e: Expr, x0, order: int) -> Jet:
    """Taylor coefficients of ``e`` at ``x0`` through ``order``.

    ``x0`` may be a float or an array of expansion points.
    """
    if order < 0:
        raise ValueError("order must be nonnegative")
    if order > MAX_ORDER:
        raise OrderLimitError(f"order {order} exceeds the cap of {MAX_ORDER}")
    if contains_op(e, "abs"):
        raise NonSmoothError("abs() is not differentiable; jets reject it")
    x0 = np.asarray(x0, dtype=float)
    with np.errstate(all="ignore"):
        coeffs = _jet(e, x0, order, x0.shape)
    if not np.all(np.isfinite(coeffs)):
        raise DomainError(f"non-finite Taylor coefficient for {e} (singular point?)")
    base = float(x0) if x0.ndim == 0 else x0
    return Jet(base, coeffs)


def derivative(e: Expr, x0, j: int):
    """``j``-th derivative of ``e`` at ``x0``."""
    return eval_jet(e, x0, j).derivative(j)


def derivatives(e: Expr, x0, order: int):
    """All derivatives ``[e(x0), e'(x0), ..., e^(order)(x0)]``."""
    return eval_jet(e, x0, order).derivatives()


def constant_jet(value, x0, order):
    c = np.zeros((order + 1,) + np.shape(x0))
    c[0] = value
    return Jet(x0, c)
