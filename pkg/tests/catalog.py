"""Closed-form problems with hand-derived leading terms.

Each amplitude comes from the exact half-line/whole-line integral of the
local model: int_R x^(2m) e^{-s x^2} dx = Gamma(m + 1/2) / s^(m + 1/2),
int_0^inf x^j e^{-s x^2} dx = Gamma((j+1)/2) / (2 s^((j+1)/2)) and
int_0^inf x^j e^{-s x} dx = j! / s^(j+1).
"""
import math
from dataclasses import dataclass

SQPI = math.sqrt(math.pi)


@dataclass(frozen=True)
class Entry:
    name: str
    g: str
    h: str
    a: float
    b: float
    case: str
    k: int
    amplitude: float
    power: float


CATALOG = [
    Entry("interior k=0", "1", "-x^2", -1, 1, "interior", 0, SQPI, -0.5),
    Entry("interior k=2", "x^2", "-x^2", -1, 1, "interior", 2, SQPI / 2, -1.5),
    Entry("interior k=4", "x^4", "-x^2", -1, 1, "interior", 4, 3 * SQPI / 4, -2.5),
    Entry("flat left k=0", "1", "-x^2", 0, 1, "endpoint_flat", 0, SQPI / 2, -0.5),
    Entry("flat left k=1", "x", "-x^2", 0, 1, "endpoint_flat", 1, 0.5, -1.0),
    Entry("flat left k=2", "x^2", "-x^2", 0, 1, "endpoint_flat", 2, SQPI / 4, -1.5),
    Entry("slope left k=0", "1", "-x", 0, 1, "endpoint_slope", 0, 1.0, -1.0),
    Entry("slope left k=1", "x", "-x", 0, 1, "endpoint_slope", 1, 1.0, -2.0),
    # shifted: y = x - 1
    Entry("shifted interior k=2", "(x-1)^2", "-(x-1)^2", 0, 2, "interior", 2, SQPI / 2, -1.5),
    # scaled: h = -4 x^2, so the Gaussian width halves
    Entry("scaled interior k=0", "1", "-(2*x)^2", -0.5, 0.5, "interior", 0, SQPI / 2, -0.5),
    # right endpoint, sloped: int_0^1 e^{tx} dx ~ e^t / t
    Entry("slope right k=0", "1", "x", 0, 1, "endpoint_slope", 0, 1.0, -1.0),
    # right endpoint, odd k: int_{-1}^0 y e^{-t y^2} dy = -1/(2t) (+ exp. small)
    Entry("flat right k=1", "x-1", "-(x-1)^2", 0, 1, "endpoint_flat", 1, -0.5, -1.0),
]


def _gauss_even_moments(t, upto):
    """int_{-1}^{1} x^(2j) e^{-t x^2} dx for j = 0..upto, by the parts recurrence
    J_j = -e^{-t}/t + (2j-1)/(2t) J_{j-1}."""
    out = [math.sqrt(math.pi / t) * math.erf(math.sqrt(t))]
    for j in range(1, upto + 1):
        out.append(-math.exp(-t) / t + (2 * j - 1) / (2 * t) * out[-1])
    return out


def exact(entry, t):
    """Closed-form value of the catalog integral at ``t``."""
    J = _gauss_even_moments(t, 2)
    e = math.exp(-t)
    return {
        "interior k=0": J[0],
        "interior k=2": J[1],
        "interior k=4": J[2],
        "flat left k=0": J[0] / 2,
        "flat left k=1": (1 - e) / (2 * t),
        "flat left k=2": J[1] / 2,
        "slope left k=0": (1 - e) / t,
        "slope left k=1": (1 - e * (1 + t)) / t**2,
        "shifted interior k=2": J[1],
        "scaled interior k=0": J[0] / 2,
        "slope right k=0": math.expm1(t) / t,
        "flat right k=1": -(1 - e) / (2 * t),
    }[entry.name]
