"""Leading-order Laplace asymptotics for integrals of exp(t*h(x)) * g(x),
including amplitudes that vanish to order k at the maximizer of h, with
composite-Simpson comparisons."""

from .analysis import AnalysisOptions, CaseTag, Classification, Problem, Side, classify, detect_k, locate_max
from .asymptotics import (
    ApproxValue,
    AsymptoticApproximation,
    double_factorial,
    eta,
    evaluate_approx,
    gamma_const,
    leading_term,
)
from .compare import (
    FitReport,
    SweepResult,
    crossover_time,
    estimate_constants,
    estimate_local_constants,
    fit_remainder_exponent,
    sweep,
)
from .errors import *  # noqa: F401,F403
from .expr import Binary, Constant, Expr, Unary, Variable, evaluate, parse, to_text
from .jet import Jet, derivative, derivatives, eval_jet
from .quadrature import QuadResult, adaptive_quad, simpson, simpson_error_bound

__version__ = "0.1.0"
