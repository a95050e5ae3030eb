"""Leading-order Laplace asymptotics for an amplitude vanishing to order k.

For a classified problem the integral behaves as

    I(t) = exp(t*h(c)) * (A * t**p + O(t**r))

with

* interior maximum (k even):
  ``A = g^(k)(c) * sqrt(2*pi / |h''(c)|**(k+1)) * (k-1)!! / k!``,
  ``p = -1/2 - k/2``, ``r = -1 - k/2``;
* endpoint maximum with ``h'(c) = 0``:
  ``A = g^(k)(c) * sqrt(2**(k-1) / |h''(c)|**(k+1)) * gamma(k, side)``,
  same ``p`` and ``r``;
* endpoint maximum with ``h'(c) != 0``:
  ``A = g^(k)(c) * h'(c)**(-1-k) * (-1)**k * eta(side)``,
  ``p = -1 - k``, ``r = -2 - k``.

At k = 0 these reduce to the classical one-term Laplace formulas; in the
sloped-endpoint case the decay is ``1/t`` (not ``1/sqrt(t)``), as the exact
integral of ``exp(-t x)`` over ``[0, 1]`` confirms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .analysis import CaseTag, Classification, Side
from .errors import DegenerateHessianError, NonPositiveTError, OddInteriorOrderError

__all__ = [
    "AsymptoticApproximation",
    "ApproxValue",
    "double_factorial",
    "gamma_const",
    "eta",
    "leading_term",
    "evaluate_approx",
]

UNDERFLOW_EXPONENT = -700.0
# below this order the amplitude is computed directly, above it in log space
LOG_SPACE_K = 8


def double_factorial(m: int) -> int:
    """``m!!`` with the conventions ``(-1)!! = 0!! = 1``."""
    if m < -1:
        raise ValueError("double factorial is defined here for m >= -1")
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


def _side(side):
    side = Side(side)
    if side is Side.NOT_ENDPOINT:
        raise ValueError("an endpoint side (left or right) is required")
    return side


def gamma_const(k: int, side) -> float:
    """Endpoint constant of the flat-endpoint case.

    Even ``k``: ``sqrt(pi / 2**k) * (k-1)!! / k!``; odd ``k``:
    ``((k-1)/2)! / k!``, negated at the right endpoint.
    """
    side = _side(side)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k % 2 == 0:
        return math.sqrt(math.pi / 2**k) * double_factorial(k - 1) / math.factorial(k)
    value = math.factorial((k - 1) // 2) / math.factorial(k)
    return value if side is Side.LEFT else -value


def eta(side) -> int:
    return -1 if _side(side) is Side.LEFT else 1


def _log_gamma_abs(k):
    # log|gamma(k, side)|, exact integer arithmetic inside the logs
    if k % 2 == 0:
        return 0.5 * (math.log(math.pi) - k * math.log(2)) + math.log(double_factorial(k - 1)) - math.log(math.factorial(k))
    return math.log(math.factorial((k - 1) // 2)) - math.log(math.factorial(k))


@dataclass(frozen=True)
class AsymptoticApproximation:
    """``exp(t*hc) * amplitude * t**power`` with remainder ``O(t**remainder_exponent)``
    after the exponential is factored out."""

    amplitude: float
    power: float
    hc: float
    remainder_exponent: float
    case_tag: CaseTag
    k: int

    def __call__(self, t):
        return evaluate_approx(self, t).value

    def as_dict(self):
        return {
            "amplitude": self.amplitude,
            "power": self.power,
            "hc": self.hc,
            "remainder_exponent": self.remainder_exponent,
            "case": self.case_tag.value,
            "k": self.k,
        }


class ApproxValue(NamedTuple):
    t: float
    value: float
    underflow: bool


def _amplitude_direct(cl):
    k, gk = cl.k, cl.gk
    if cl.case_tag is CaseTag.INTERIOR:
        return gk * math.sqrt(2 * math.pi / abs(cl.h2) ** (k + 1)) * double_factorial(k - 1) / math.factorial(k)
    if cl.case_tag is CaseTag.ENDPOINT_FLAT:
        return gk * math.sqrt(2.0 ** (k - 1) / abs(cl.h2) ** (k + 1)) * gamma_const(k, cl.side)
    return gk * cl.h1 ** (-1 - k) * (-1) ** k * eta(cl.side)


def _amplitude_log(cl):
    k, gk = cl.k, cl.gk
    log_abs = math.log(abs(gk))
    sign = math.copysign(1.0, gk)
    if cl.case_tag is CaseTag.INTERIOR:
        log_abs += 0.5 * (math.log(2 * math.pi) - (k + 1) * math.log(abs(cl.h2)))
        log_abs += math.log(double_factorial(k - 1)) - math.log(math.factorial(k))
    elif cl.case_tag is CaseTag.ENDPOINT_FLAT:
        log_abs += 0.5 * ((k - 1) * math.log(2) - (k + 1) * math.log(abs(cl.h2)))
        log_abs += _log_gamma_abs(k)
        sign *= math.copysign(1.0, gamma_const(k, cl.side))
    else:
        log_abs -= (1 + k) * math.log(abs(cl.h1))
        if cl.h1 < 0 and (1 + k) % 2 == 1:
            sign = -sign
        sign *= (-1) ** k * eta(cl.side)
    return sign * math.exp(log_abs)


def leading_term(cl: Classification, log_space: bool | None = None) -> AsymptoticApproximation:
    """Leading-order term for a classified problem.

    The amplitude is accumulated in log space for ``k >= 8`` (or when
    ``log_space`` is forced) so large powers of ``|h''(c)|`` and factorials
    cannot overflow.
    """
    k = cl.k
    if cl.case_tag is CaseTag.INTERIOR and k % 2:
        raise OddInteriorOrderError(f"odd vanishing order k={k} at an interior maximum")
    if cl.case_tag is not CaseTag.ENDPOINT_SLOPE and cl.h2 == 0:
        raise DegenerateHessianError("h''(c) = 0")
    if log_space is None:
        log_space = k >= LOG_SPACE_K
    amplitude = _amplitude_log(cl) if log_space else _amplitude_direct(cl)
    if not math.isfinite(amplitude) or amplitude == 0:
        raise ArithmeticError(f"amplitude {amplitude!r} is not a finite nonzero number")
    if cl.case_tag is CaseTag.ENDPOINT_SLOPE:
        power, remainder = -1.0 - k, -2.0 - k
    else:
        power, remainder = -0.5 - k / 2, -1.0 - k / 2
    return AsymptoticApproximation(
        amplitude=amplitude,
        power=power,
        hc=cl.hc,
        remainder_exponent=remainder,
        case_tag=cl.case_tag,
        k=k,
    )


def evaluate_approx(ap: AsymptoticApproximation, t: float) -> ApproxValue:
    """``exp(t*hc) * A * t**p``; flags (and returns 0) when ``t*hc < -700``."""
    t = float(t)
    if not t > 0:
        raise NonPositiveTError(f"t must be positive, got {t!r}")
    exponent = t * ap.hc
    if exponent < UNDERFLOW_EXPONENT:
        return ApproxValue(t, 0.0, True)
    try:
        value = math.exp(exponent) * ap.amplitude * t**ap.power
    except OverflowError:
        value = math.copysign(math.inf, ap.amplitude)
    return ApproxValue(t, value, False)
