"""Composite Simpson's rule, its fourth-derivative error bound, and an
adaptive Simpson oracle used as ground truth for the integral."""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from .analysis import Problem
from .errors import DepthExceededError, EvaluationError, NonPositiveTError, OddPanelError
from .jet import eval_jet

__all__ = [
    "QuadResult",
    "simpson",
    "simpson_error_bound",
    "adaptive_quad",
    "integrand_fourth_derivative",
    "MIN_ADAPTIVE_TOL",
    "MAX_DEPTH",
]

MIN_ADAPTIVE_TOL = 1e-13
MAX_DEPTH = 60
# the adaptive oracle always subdivides to this depth before testing
MIN_DEPTH = 6


@dataclass(frozen=True)
class QuadResult:
    value: float
    method: str
    n: int | None = None
    evaluations: int | None = None
    error_bound: float | None = None
    requested_tol: float | None = None

    def as_dict(self):
        out = {"value": self.value, "method": self.method}
        if self.method == "simpson":
            out["n"] = self.n
            out["error_bound"] = self.error_bound
        else:
            out["evaluations"] = self.evaluations
            out["requested_tol"] = self.requested_tol
        return out


def _check_t(t):
    if not t > 0:
        raise NonPositiveTError(f"t must be positive, got {t!r}")


def _check_panels(n):
    if int(n) != n or n < 2 or n % 2:
        raise OddPanelError(f"composite Simpson needs an even number of panels >= 2, got {n!r}")


def _integrand_values(p, t, x):
    f = p.integrand(t, x)
    if not np.all(np.isfinite(f)):
        raise EvaluationError(f"integrand is not finite on [{p.a}, {p.b}] at t={t}")
    return f


def simpson(p: Problem, t: float, n: int) -> QuadResult:
    """Composite Simpson's rule with ``n`` panels, summed exactly (``math.fsum``)."""
    _check_t(t)
    _check_panels(n)
    n = int(n)
    mesh = (p.b - p.a) / n
    x = p.a + np.arange(n + 1) * mesh
    f = _integrand_values(p, t, x)
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    # weights are powers of two, so w*f is exact and fsum is the only rounding
    value = mesh / 3 * math.fsum(w * f)
    return QuadResult(value=value, method="simpson", n=n)


def integrand_fourth_derivative(p: Problem, t: float, x):
    """Exact ``d^4/dx^4 [exp(t*h(x)) * g(x)]`` at the points ``x`` via order-4 jets."""
    hj = eval_jet(p.h, x, 4)
    gj = eval_jet(p.g, x, 4)
    with np.errstate(over="ignore", invalid="ignore"):
        f = (hj * t).exp() * gj
    return f.derivative(4)


def simpson_error_bound(p: Problem, t: float, n: int, sample_points: int = 1001) -> float:
    """``(b-a)**5 / (180 n**4) * max|f''''|`` with the max taken over a uniform
    sample of ``sample_points`` points (an estimate of the supremum, not a
    rigorous bound)."""
    _check_t(t)
    _check_panels(n)
    if sample_points < 101:
        raise ValueError("sample_points must be at least 101")
    x = np.linspace(p.a, p.b, sample_points)
    d4 = integrand_fourth_derivative(p, t, x)
    if not np.all(np.isfinite(d4)):
        raise EvaluationError(f"fourth derivative of the integrand overflows at t={t}")
    m4 = float(np.max(np.abs(d4)))
    return (p.b - p.a) ** 5 / (180 * float(n) ** 4) * m4


def adaptive_quad(p: Problem, t: float, tol: float, dps: int | None = None) -> QuadResult:
    """Adaptive Simpson quadrature to absolute tolerance ``tol``.

    Each interval is accepted when ``|S_fine - S_coarse| <= 15 * tol_i``; a
    rejected interval splits in two and each half gets ``tol_i / 2``.  The
    accepted value includes the Richardson correction
    ``(S_fine - S_coarse) / 15``.  The first ``MIN_DEPTH`` levels are always
    subdivided so that narrow peaks are not missed, and an interval whose
    discrepancy is at the rounding level of its own value is accepted.

    With ``dps`` the integrand is evaluated in mpmath arithmetic at that many
    decimal digits and the returned ``value`` is an ``mpmath.mpf``; this is
    for residuals that are smaller than double-precision rounding of the
    integral itself.
    """
    _check_t(t)
    if dps is None and not tol >= MIN_ADAPTIVE_TOL:
        raise ValueError(f"tol must be at least {MIN_ADAPTIVE_TOL:g}, got {tol!r}")
    if dps is None:
        return _adaptive_float(p, t, tol)
    with mpmath.workdps(dps):
        return _adaptive_mp(p, t, tol, mpmath.mpf(10) ** (-dps))


def _adaptive_float(p, t, tol):
    a, b = p.a, p.b
    l = np.array([a])
    r = np.array([b])
    f = lambda x: _integrand_values(p, t, x)  # noqa: E731
    fl = f(l)
    fr = f(r)
    fm = f((l + r) / 2)
    whole = (r - l) / 6 * (fl + 4 * fm + fr)
    tol_i = np.array([float(tol)])
    evaluations = 3
    eps = np.finfo(float).eps
    accepted_left = []
    accepted_value = []
    for depth in range(MAX_DEPTH + 1):
        m = (l + r) / 2
        flm = f((l + m) / 2)
        fmr = f((m + r) / 2)
        evaluations += 2 * len(l)
        left = (m - l) / 6 * (fl + 4 * flm + fm)
        right = (r - m) / 6 * (fm + 4 * fmr + fr)
        fine = left + right
        err = np.abs(fine - whole)
        if depth >= MIN_DEPTH:
            ok = (err <= 15 * tol_i) | (err <= 64 * eps * (np.abs(left) + np.abs(right)))
        else:
            ok = np.zeros(len(l), dtype=bool)
        accepted_left.append(l[ok])
        accepted_value.append(fine[ok] + (fine[ok] - whole[ok]) / 15)
        keep = ~ok
        if not keep.any():
            break
        if depth == MAX_DEPTH:
            worst = int(np.argmax(np.where(keep, err / tol_i, -np.inf)))
            raise DepthExceededError(
                f"adaptive Simpson exceeded depth {MAX_DEPTH}; worst interval "
                f"[{l[worst]:.17g}, {r[worst]:.17g}]",
                interval=(float(l[worst]), float(r[worst])),
            )
        l, m, r = l[keep], m[keep], r[keep]
        fl, flm, fm, fmr, fr = fl[keep], flm[keep], fm[keep], fmr[keep], fr[keep]
        half = tol_i[keep] / 2
        # children: [l, m] with (fl, flm, fm) and [m, r] with (fm, fmr, fr)
        l, r = np.concatenate([l, m]), np.concatenate([m, r])
        fl, fm, fr = np.concatenate([fl, fm]), np.concatenate([flm, fmr]), np.concatenate([fm, fr])
        whole = np.concatenate([left[keep], right[keep]])
        tol_i = np.concatenate([half, half])
    lefts = np.concatenate(accepted_left)
    values = np.concatenate(accepted_value)
    order = np.argsort(lefts, kind="stable")
    value = math.fsum(values[order])
    return QuadResult(value=value, method="adaptive", evaluations=evaluations, requested_tol=float(tol))


def _adaptive_mp(p, t, tol, eps):
    mpf = mpmath.mpf
    t = mpf(t)

    def f(x):
        v = p.integrand(t, x)
        if not mpmath.isfinite(v):
            raise EvaluationError(f"integrand is not finite at x={x}")
        return v

    a, b = mpf(p.a), mpf(p.b)
    fa, fb, fmid = f(a), f(b), f((a + b) / 2)
    evaluations = 3
    # (l, r, fl, fm, fr, whole, tol_i)
    active = [(a, b, fa, fmid, fb, (b - a) / 6 * (fa + 4 * fmid + fb), mpf(tol))]
    accepted = []
    for depth in range(MAX_DEPTH + 1):
        nxt = []
        for l, r, fl, fm, fr, whole, tol_i in active:
            m = (l + r) / 2
            flm = f((l + m) / 2)
            fmr = f((m + r) / 2)
            evaluations += 2
            left = (m - l) / 6 * (fl + 4 * flm + fm)
            right = (r - m) / 6 * (fm + 4 * fmr + fr)
            fine = left + right
            err = abs(fine - whole)
            if depth >= MIN_DEPTH and (err <= 15 * tol_i or err <= 64 * eps * (abs(left) + abs(right))):
                accepted.append((l, fine + (fine - whole) / 15))
                continue
            if depth == MAX_DEPTH:
                raise DepthExceededError(
                    f"adaptive Simpson exceeded depth {MAX_DEPTH}; worst interval [{l}, {r}]",
                    interval=(float(l), float(r)),
                )
            nxt.append((l, m, fl, flm, fm, left, tol_i / 2))
            nxt.append((m, r, fm, fmr, fr, right, tol_i / 2))
        if not nxt:
            break
        active = nxt
    accepted.sort(key=lambda lv: lv[0])
    value = mpmath.fsum(v for _, v in accepted)
    return QuadResult(value=value, method="adaptive", evaluations=evaluations, requested_tol=float(tol))
