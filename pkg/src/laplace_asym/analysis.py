"""Locate the maximizer of the phase, find the vanishing order of the
amplitude there, and decide which leading-order formula applies."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    AllDerivativesVanishError,
    DegenerateHessianError,
    HypothesisError,
    NonUniqueMaxError,
    OddInteriorOrderError,
)
from .expr import Expr, evaluate, parse, to_text
from .jet import eval_jet

__all__ = [
    "AnalysisOptions",
    "Problem",
    "CaseTag",
    "Side",
    "Classification",
    "locate_max",
    "detect_k",
    "classify",
]

_INV_PHI = (math.sqrt(5) - 1) / 2


class CaseTag(str, enum.Enum):
    INTERIOR = "interior"
    ENDPOINT_FLAT = "endpoint_flat"
    ENDPOINT_SLOPE = "endpoint_slope"


class Side(str, enum.Enum):
    NOT_ENDPOINT = "none"
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class AnalysisOptions:
    """Numerical knobs for :func:`classify`.

    ``refine_tol`` and ``endpoint_tol`` default to ``1e-12 * (b - a)`` and
    ``1e-9 * (b - a)``; leave them as ``None`` to get the defaults.
    """

    grid_points: int = 2049
    refine_tol: float | None = None
    endpoint_tol: float | None = None
    deriv_zero_tol: float = 1e-9
    k_max: int = 16

    def __post_init__(self):
        if self.grid_points < 3 or self.grid_points % 2 == 0:
            raise ValueError("grid_points must be odd and at least 3")
        for name in ("refine_tol", "endpoint_tol", "deriv_zero_tol"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.k_max <= 31:
            raise ValueError("k_max must lie in [0, 31]")

    def resolved(self, a, b):
        width = b - a
        return replace(
            self,
            refine_tol=self.refine_tol if self.refine_tol is not None else 1e-12 * width,
            endpoint_tol=self.endpoint_tol if self.endpoint_tol is not None else 1e-9 * width,
        )


@dataclass(frozen=True)
class Problem:
    """The integral of ``exp(t*h(x)) * g(x)`` over ``[a, b]``.

    ``g`` and ``h`` may be given as expression text.
    """

    g: Expr
    h: Expr
    a: float
    b: float
    options: AnalysisOptions = field(default_factory=AnalysisOptions)

    def __post_init__(self):
        if isinstance(self.g, str):
            object.__setattr__(self, "g", parse(self.g))
        if isinstance(self.h, str):
            object.__setattr__(self, "h", parse(self.h))
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ValueError(f"need finite a < b, got a={self.a}, b={self.b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "options", self.options.resolved(a, b))

    def grid(self, points=None):
        return np.linspace(self.a, self.b, points or self.options.grid_points)

    def integrand(self, t, x):
        """``exp(t*h(x)) * g(x)``, for scalar or array ``x``."""
        hv = evaluate(self.h, x)
        gv = evaluate(self.g, x)
        if isinstance(x, np.ndarray):
            with np.errstate(over="ignore"):
                return np.exp(t * hv) * gv
        import mpmath

        if isinstance(x, mpmath.mpf):
            return mpmath.exp(t * hv) * gv
        return math.exp(t * hv) * gv

    def describe(self):
        return {"g": to_text(self.g), "h": to_text(self.h), "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Classification:
    c: float
    case_tag: CaseTag
    side: Side
    k: int
    gk: float
    h1: float
    h2: float
    h3: float
    hc: float

    def as_dict(self):
        return {
            "c": self.c,
            "case": self.case_tag.value,
            "side": self.side.value,
            "k": self.k,
            "gk": self.gk,
            "h1": self.h1,
            "h2": self.h2,
            "h3": self.h3,
            "hc": self.hc,
        }


def _golden_max(f, lo, hi, tol):
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(200):
        if hi - lo <= tol:
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
    candidates = [(f(lo), lo), (f1, x1), (f2, x2), (f(hi), hi)]
    # first of the largest: ties resolve toward the left
    return max(candidates, key=lambda fc: fc[0])[1]


def _newton_polish(h, c, lo, hi, tol, max_iter=100):
    """Refine a stationary point with Newton steps on h'.

    Golden-section search only resolves the maximizer to about
    sqrt(eps) relative to h's scale; Newton on exact jet derivatives
    pushes it to the true stationary point.  Steps leaving [lo, hi] or
    hitting h'' >= 0 stop the iteration.
    """
    for _ in range(max_iter):
        jet = eval_jet(h, c, 2)
        d1, d2 = jet.derivative(1), jet.derivative(2)
        if not d2 < 0:
            break
        step = -d1 / d2
        new = c + step
        if not lo <= new <= hi:
            break
        c = new
        if abs(step) <= tol:
            break
    return c


def locate_max(p: Problem, strict: bool = True):
    """Return ``(c, unique)`` for the global maximizer of ``h`` on ``[a, b]``.

    The maximum is bracketed on a uniform grid (lowest index wins ties),
    refined by golden-section search and polished with Newton steps.  It is
    deemed non-unique when another grid sample within ``1e-12`` (relative to
    the scale of ``h``) of the maximum lies more than 10 cells away; with
    ``strict`` this raises :class:`NonUniqueMaxError`.
    """
    opts = p.options
    xs = p.grid()
    hv = evaluate(p.h, xs)
    i = int(np.argmax(hv))
    hmax = hv[i]
    scale = max(1.0, float(np.max(np.abs(hv))))
    near = np.flatnonzero(hv >= hmax - 1e-12 * scale)
    unique = not np.any(np.abs(near - i) > 10)
    if not unique and strict:
        others = xs[near[np.abs(near - i) > 10]]
        raise NonUniqueMaxError(
            f"non-unique maximum: h attains {hmax:.6g} near x={xs[i]:.6g} and x={others[0]:.6g}"
        )
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, len(xs) - 1)]
    hfun = lambda x: evaluate(p.h, x)  # noqa: E731
    c = _golden_max(hfun, lo, hi, opts.refine_tol)
    c = _newton_polish(p.h, c, lo, hi, opts.refine_tol)
    return min(max(c, p.a), p.b), unique


def detect_k(p: Problem, c: float):
    """Smallest ``j <= k_max`` with a non-negligible ``g^(j)(c)``.

    Returns ``(k, g^(k)(c))``.  The threshold is ``deriv_zero_tol`` times
    ``max(1, max|g|)`` over the analysis grid, so the decision does not depend
    on the overall scale of ``g``.
    """
    opts = p.options
    gmax = float(np.max(np.abs(evaluate(p.g, p.grid()))))
    threshold = opts.deriv_zero_tol * max(1.0, gmax)
    derivs = eval_jet(p.g, c, opts.k_max).derivatives()
    for j, d in enumerate(derivs):
        if abs(d) > threshold:
            return j, float(d)
    raise AllDerivativesVanishError(
        f"all derivatives of g up to order {opts.k_max} vanish at c={c:.17g}"
    )


def classify(p: Problem) -> Classification:
    """Determine the maximizer, its case and the data the leading term needs."""
    opts = p.options
    c, _ = locate_max(p)
    if abs(c - p.a) <= opts.endpoint_tol:
        c, side = p.a, Side.LEFT
    elif abs(c - p.b) <= opts.endpoint_tol:
        c, side = p.b, Side.RIGHT
    else:
        side = Side.NOT_ENDPOINT

    hjet = eval_jet(p.h, c, 3)
    hc, h1, h2, h3 = (hjet.derivative(j) for j in range(4))
    tol = opts.deriv_zero_tol
    flat = abs(h1) <= tol

    if side is Side.NOT_ENDPOINT:
        if not flat:
            raise HypothesisError(f"interior maximizer c={c:.17g} is not stationary (h'(c)={h1:.3g})")
        case = CaseTag.INTERIOR
    elif flat:
        case = CaseTag.ENDPOINT_FLAT
    else:
        case = CaseTag.ENDPOINT_SLOPE
        if (side is Side.LEFT and h1 > 0) or (side is Side.RIGHT and h1 < 0):
            raise HypothesisError(f"h'(c)={h1:.3g} is inconsistent with a maximum at the {side.value} endpoint")

    if case is not CaseTag.ENDPOINT_SLOPE:
        if abs(h2) <= tol:
            raise DegenerateHessianError(f"degenerate second derivative: |h''(c)| = {abs(h2):.3g} <= {tol:.3g}")
        if h2 > 0:
            raise HypothesisError(f"h''(c)={h2:.3g} > 0 is inconsistent with a maximum at c={c:.17g}")

    k, gk = detect_k(p, c)
    if case is CaseTag.INTERIOR and k % 2 == 1:
        raise OddInteriorOrderError(
            f"g vanishes to odd order k={k} at the interior maximum c={c:.17g}; "
            "the leading term cancels and a higher-order expansion would be needed"
        )
    return Classification(
        c=float(c) + 0.0, case_tag=case, side=side, k=k, gk=gk,
        h1=h1 + 0.0, h2=h2 + 0.0, h3=h3 + 0.0, hc=hc + 0.0,
    )
