"""Asymptotic formula versus composite Simpson: sweeps over t, remainder-rate
fits, error-model constants and the crossover time beyond which the
asymptotic error model drops below the Simpson error model.

The two error models, with ``H = max|h|`` on ``[a, b]``, are

    E_L(t) = C0 * exp(t*H) * t**r          (asymptotic formula)
    E_S(t) = c0 / n**4 * exp(t*H) * t**4   (Simpson with n panels)

so ``E_L < E_S`` exactly when ``t > (C0 * n**4 / c0) ** (1 / (4 - r))``; for
the two flat cases ``4 - r = 5 + k/2``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np

from .analysis import Classification, Problem, classify
from .asymptotics import AsymptoticApproximation, evaluate_approx, leading_term
from .errors import InsufficientPointsError, NonPositiveConstantError
from .expr import evaluate
from .quadrature import adaptive_quad, simpson

__all__ = [
    "SweepResult",
    "FitReport",
    "sweep",
    "fit_remainder_exponent",
    "estimate_constants",
    "estimate_local_constants",
    "crossover_time",
    "asymptotic_error_model",
    "simpson_error_model",
    "crossover_violations",
    "worker_count",
]

NOISE_FACTOR = 100.0
DEFAULT_BAND = 0.15
DEFAULT_MIN_R2 = 0.98
# same resolution as the fourth-derivative sample in the Simpson bound
H_SAMPLE_POINTS = 1001
THREADS_ENV = "LAPLACE_ASYM_THREADS"


def worker_count():
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


@dataclass(frozen=True, eq=False)
class SweepResult:
    t_values: np.ndarray
    integral_values: np.ndarray
    approx_values: np.ndarray
    underflow: np.ndarray
    residuals: np.ndarray
    scaled_residuals: np.ndarray
    below_noise: np.ndarray
    n_list: tuple
    simpson_values: np.ndarray  # shape (len(t_values), len(n_list))
    simpson_errors: np.ndarray
    hmax_abs: float
    oracle_tol: float
    classification: Classification
    approximation: AsymptoticApproximation

    @property
    def usable(self):
        return ~self.below_noise & (self.scaled_residuals > 0)

    def rows(self):
        """One dict per t, in t order (the CLI table)."""
        out = []
        for i, t in enumerate(self.t_values):
            row = {
                "t": float(t),
                "oracle": float(self.integral_values[i]),
                "approx": float(self.approx_values[i]),
                "residual": float(self.residuals[i]),
                "scaled_residual": float(self.scaled_residuals[i]),
                "below_noise": bool(self.below_noise[i]),
            }
            for j, n in enumerate(self.n_list):
                row[f"simpson_error_n{n}"] = float(self.simpson_errors[i, j])
            out.append(row)
        return out


@dataclass(frozen=True)
class FitReport:
    slope: float
    intercept: float
    r_squared: float
    theoretical_exponent: float
    passed: bool
    one_sided: bool
    points_used: int
    band: float

    def as_dict(self):
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "theoretical_exponent": self.theoretical_exponent,
            "pass": self.passed,
            "one_sided": self.one_sided,
            "points_used": self.points_used,
            "band": self.band,
        }


def _point(p, ap, t, n_list, oracle_tol, dps):
    svals = [simpson(p, t, n).value for n in n_list]
    if dps is None:
        oracle = adaptive_quad(p, t, oracle_tol).value
        serr = [abs(v - oracle) for v in svals]
        av = evaluate_approx(ap, t)
        residual = oracle - av.value
        scaled = abs(residual) * math.exp(-t * ap.hc) if not av.underflow else 0.0
        approx, underflow = av.value, av.underflow
    else:
        with mpmath.workdps(dps):
            oracle_mp = adaptive_quad(p, t, oracle_tol, dps=dps).value
            tm = mpmath.mpf(t)
            local = mpmath.mpf(ap.amplitude) * tm ** ap.power
            res_mp = oracle_mp - mpmath.exp(tm * ap.hc) * local
            oracle = float(oracle_mp)
            residual = float(res_mp)
            scaled = float(abs(res_mp) * mpmath.exp(-tm * ap.hc))
            serr = [float(abs(mpmath.mpf(v) - oracle_mp)) for v in svals]
            av = evaluate_approx(ap, t)
            approx, underflow = av.value, av.underflow
    return oracle, approx, underflow, residual, scaled, svals, serr


def sweep(
    p: Problem,
    t_min: float,
    t_max: float,
    points: int,
    n_list=(),
    oracle_tol: float = 1e-12,
    dps: int | None = None,
) -> SweepResult:
    """Oracle, leading term, residual and Simpson values on a geometric t-grid.

    Points whose residual is under ``100 * oracle_tol * |I(t)|`` are flagged in
    ``below_noise`` and left out of fits and constant estimates.  With ``dps``
    the oracle and the residual are computed in extended precision.
    """
    if points < 5:
        raise ValueError(f"a sweep needs at least 5 points, got {points}")
    if not 0 < t_min < t_max:
        raise ValueError(f"need 0 < t_min < t_max, got {t_min}, {t_max}")
    n_list = tuple(int(n) for n in n_list)
    cl = classify(p)
    ap = leading_term(cl)
    ts = np.geomspace(t_min, t_max, points)

    def work(t):
        return _point(p, ap, float(t), n_list, oracle_tol, dps)

    # the mpmath precision context is process-global, so extended precision runs serially
    workers = 1 if dps is not None else min(worker_count(), points)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, ts))
    else:
        results = [work(t) for t in ts]

    oracle = np.array([r[0] for r in results])
    approx = np.array([r[1] for r in results])
    underflow = np.array([r[2] for r in results], dtype=bool)
    residuals = np.array([r[3] for r in results])
    scaled = np.array([r[4] for r in results])
    svals = np.array([r[5] for r in results], dtype=float).reshape(points, len(n_list))
    serr = np.array([r[6] for r in results], dtype=float).reshape(points, len(n_list))
    below = np.abs(residuals) < NOISE_FACTOR * oracle_tol * np.abs(oracle)
    hmax_abs = float(np.max(np.abs(evaluate(p.h, np.linspace(p.a, p.b, H_SAMPLE_POINTS)))))
    return SweepResult(
        t_values=ts,
        integral_values=oracle,
        approx_values=approx,
        underflow=underflow,
        residuals=residuals,
        scaled_residuals=scaled,
        below_noise=below,
        n_list=n_list,
        simpson_values=svals,
        simpson_errors=serr,
        hmax_abs=hmax_abs,
        oracle_tol=oracle_tol,
        classification=cl,
        approximation=ap,
    )


def fit_remainder_exponent(
    s: SweepResult, band: float = DEFAULT_BAND, min_r2: float = DEFAULT_MIN_R2
) -> FitReport:
    """Least-squares slope of log(scaled residual) against log(t).

    Passes when the slope is within ``band`` of the predicted remainder
    exponent with ``r_squared >= min_r2``, or, one-sidedly, when the residual
    decays clearly faster than predicted (slope below ``r - band``): the
    predicted exponent is an upper bound, not a sharp rate.
    """
    usable = s.usable
    if usable.sum() < 5:
        raise InsufficientPointsError(
            f"only {int(usable.sum())} usable points above the noise floor; need 5"
        )
    x = np.log(s.t_values[usable])
    y = np.log(s.scaled_residuals[usable])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    r2 = min(max(r2, 0.0), 1.0)
    r = s.approximation.remainder_exponent
    two_sided = abs(slope - r) <= band and r2 >= min_r2
    one_sided = (not two_sided) and slope < r - band
    return FitReport(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        theoretical_exponent=r,
        passed=bool(two_sided or one_sided),
        one_sided=bool(one_sided),
        points_used=int(usable.sum()),
        band=band,
    )


def _max_log(log_values):
    log_values = np.asarray(log_values, dtype=float)
    log_values = log_values[np.isfinite(log_values)]
    if log_values.size == 0:
        return None
    return float(np.max(log_values))


def _constants(s, r, phase):
    usable = s.usable
    if not usable.any():
        raise InsufficientPointsError("no residual above the noise floor")
    if len(s.n_list) == 0:
        raise InsufficientPointsError("the sweep has no Simpson errors")
    t = s.t_values
    with np.errstate(divide="ignore"):
        log_res = np.log(np.abs(s.residuals[usable])) - t[usable] * phase - r * np.log(t[usable])
        n4 = np.array(s.n_list, dtype=float) ** 4
        log_simp = (
            np.log(s.simpson_errors)
            + np.log(n4)[None, :]
            - (t * phase)[:, None]
            - 4 * np.log(t)[:, None]
        )
    lc = _max_log(log_res)
    ls = _max_log(log_simp)
    if lc is None or ls is None:
        raise InsufficientPointsError("no nonzero errors to estimate constants from")
    return math.exp(lc), math.exp(ls)


def estimate_constants(s: SweepResult, k: int | None = None, r: float | None = None):
    """Smallest constants ``(C0, c0)`` making both error models hold on the sweep.

    Both use the ``exp(t * max|h|)`` normalization, which can make them tiny
    when ``h(c)`` is far below ``max|h|``; see :func:`estimate_local_constants`.
    ``k`` is accepted for symmetry with :func:`crossover_time`; the rate comes
    from ``r`` (default: the sweep's remainder exponent).
    """
    if r is None:
        r = s.approximation.remainder_exponent
    return _constants(s, r, s.hmax_abs)


def estimate_local_constants(s: SweepResult, r: float | None = None):
    """Same as :func:`estimate_constants` but normalized by ``exp(t*h(c))``."""
    if r is None:
        r = s.approximation.remainder_exponent
    return _constants(s, r, s.approximation.hc)


def crossover_time(C0: float, c0: float, n: int, k: int, remainder_exponent: float | None = None) -> float:
    """``(C0 * n**4 / c0) ** (1 / (5 + k/2))``.

    With ``remainder_exponent`` the root is ``1 / (4 - r)`` instead, which is
    the same for the flat cases and also covers the sloped-endpoint case.
    """
    if not (C0 > 0 and c0 > 0):
        raise NonPositiveConstantError(f"constants must be positive, got C0={C0!r}, c0={c0!r}")
    if n < 1:
        raise ValueError(f"panel count must be positive, got {n}")
    root = 4.0 - remainder_exponent if remainder_exponent is not None else 5.0 + k / 2
    # log form: C0 and c0 can be far outside the double range's comfortable middle
    return math.exp((math.log(C0) + 4 * math.log(n) - math.log(c0)) / root)


def asymptotic_error_model(C0, H, r, t):
    return C0 * np.exp(np.asarray(t) * H) * np.asarray(t, dtype=float) ** r


def simpson_error_model(c0, H, n, t):
    return c0 / float(n) ** 4 * np.exp(np.asarray(t) * H) * np.asarray(t, dtype=float) ** 4


def crossover_violations(s: SweepResult, T: float, n: int):
    """Sweep points beyond ``T`` where the measured asymptotic residual is not
    strictly smaller than the measured Simpson error for ``n`` panels."""
    j = s.n_list.index(n)
    beyond = s.t_values > T
    bad = beyond & ~(np.abs(s.residuals) < s.simpson_errors[:, j])
    return [float(t) for t in s.t_values[bad]]
