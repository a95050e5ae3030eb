import math
from dataclasses import replace

import numpy as np
import pytest

from laplace_asym.analysis import Problem
from laplace_asym.compare import (
    THREADS_ENV,
    crossover_time,
    estimate_constants,
    estimate_local_constants,
    fit_remainder_exponent,
    sweep,
    worker_count,
)
from laplace_asym.errors import InsufficientPointsError, NonPositiveConstantError, NonUniqueMaxError

MOMENT = Problem("x^2", "-x^2", -1, 1)


@pytest.fixture(scope="module")
def moment_sweep():
    return sweep(MOMENT, 10, 1000, 25, n_list=(64, 512))


def test_sweep_shape_and_order(moment_sweep):
    s = moment_sweep
    assert len(s.t_values) == 25 and np.all(np.diff(s.t_values) > 0)
    assert s.t_values[0] == pytest.approx(10) and s.t_values[-1] == pytest.approx(1000)
    for arr in (s.integral_values, s.approx_values, s.residuals, s.scaled_residuals):
        assert arr.shape == (25,)
    assert s.simpson_errors.shape == (25, 2)


def test_sweep_simpson_accuracy(moment_sweep):
    s = moment_sweep
    j = s.n_list.index(512)
    assert np.all(s.simpson_errors[s.t_values <= 50, j] < 1e-8)


def test_sweep_scaled_residual_small(moment_sweep):
    # the residual here is an erf tail, so every point is near or below the noise floor
    s = moment_sweep
    assert np.all(s.scaled_residuals[s.t_values > 40] < 1e-10)


def test_sweep_rejects_constant_phase_and_few_points():
    with pytest.raises(NonUniqueMaxError):
        sweep(Problem("1", "0", 0, 1), 1, 10, 5)
    with pytest.raises(ValueError):
        sweep(MOMENT, 1, 10, 4)
    with pytest.raises(ValueError):
        sweep(MOMENT, 10, 1, 5)


def test_fit_interior_rate_is_an_upper_bound():
    # cos(x) = 1 - x^2/2 + ...: the correction is -sqrt(pi)/4 t^(-3/2), one
    # half-power faster than the t^(-1) bound, because odd Gaussian moments vanish
    s = sweep(Problem("cos(x)", "-x^2", -1, 1), 2, 60, 15)
    report = fit_remainder_exponent(s)
    assert report.theoretical_exponent == -1.0
    assert report.slope == pytest.approx(-1.5, abs=0.1)
    assert report.passed and report.one_sided


def test_fit_two_sided_rate():
    # at an endpoint the odd moment survives: int_0^1 x e^{-t x^2} dx ~ 1/(2t)
    s = sweep(Problem("1+x", "-x^2", 0, 1), 5, 500, 15)
    report = fit_remainder_exponent(s)
    assert report.theoretical_exponent == -1.0
    assert report.passed and not report.one_sided
    assert report.r_squared >= 0.98
    assert report.slope == pytest.approx(-1.0, abs=0.05)


def test_fit_sloped_endpoint_super_polynomial():
    s = sweep(Problem("1", "-x", 0, 1), 2, 200, 20)
    report = fit_remainder_exponent(s)
    assert s.below_noise[-1]
    assert report.passed and report.one_sided and report.slope < -2.15


def test_fit_insufficient_points(moment_sweep):
    with pytest.raises(InsufficientPointsError):
        fit_remainder_exponent(sweep(Problem("1", "-x", 0, 1), 100, 1000, 6))


def test_constants_positive_and_homogeneous():
    s = sweep(Problem("cos(x)", "-x^2", -1, 1), 2, 60, 12, n_list=(16, 64))
    C0, c0 = estimate_constants(s)
    assert C0 > 0 and c0 > 0 and math.isfinite(C0) and math.isfinite(c0)
    doubled = replace(s, simpson_errors=2 * s.simpson_errors)
    assert estimate_constants(doubled)[1] == 2 * c0 or estimate_constants(doubled)[1] == pytest.approx(2 * c0, rel=1e-15)
    assert estimate_constants(doubled)[0] == C0


def test_constants_definition_check():
    s = sweep(Problem("cos(x)", "-x^2", -1, 1), 2, 60, 12, n_list=(16, 64))
    C0, c0 = estimate_constants(s)
    r = s.approximation.remainder_exponent
    H = s.hmax_abs
    u = s.usable
    t = s.t_values
    assert np.all(np.abs(s.residuals[u]) <= C0 * np.exp(t[u] * H) * t[u] ** r * (1 + 1e-12))
    for j, n in enumerate(s.n_list):
        assert np.all(s.simpson_errors[:, j] <= c0 / n**4 * np.exp(t * H) * t**4 * (1 + 1e-12))
    # with h(c) = 0 the two normalizations differ only through max|h| = 1
    Cl, cl = estimate_local_constants(s)
    assert Cl >= C0 and cl >= c0


def test_constants_need_usable_points():
    s = sweep(Problem("1", "-x", 0, 1), 100, 1000, 6, n_list=(16,))
    with pytest.raises(InsufficientPointsError):
        estimate_constants(s)


def test_crossover_examples():
    assert crossover_time(1.0, 1.0, 1, 0) == pytest.approx(1.0, rel=1e-15)
    assert crossover_time(32.0, 1.0, 1, 0) == pytest.approx(2.0, rel=1e-15)
    assert crossover_time(2.0, 2.0 / 32 * 16, 2, 0) == pytest.approx(2.0, rel=1e-15)
    # the sloped case uses the remainder exponent: 4 - (-2) = 6
    assert crossover_time(64.0, 1.0, 1, 0, remainder_exponent=-2.0) == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(NonPositiveConstantError):
        crossover_time(0.0, 1.0, 2, 0)
    with pytest.raises(NonPositiveConstantError):
        crossover_time(1.0, -1.0, 2, 0)


def test_crossover_monotone():
    ns = [2, 4, 8, 16, 64, 512]
    ts = [crossover_time(1e-3, 1e-5, n, 2) for n in ns]
    assert all(a < b for a, b in zip(ts, ts[1:]))
    assert crossover_time(2e-3, 1e-5, 8, 2) > crossover_time(1e-3, 1e-5, 8, 2)
    assert crossover_time(1e-3, 2e-5, 8, 2) < crossover_time(1e-3, 1e-5, 8, 2)


def test_thread_count_does_not_change_results(monkeypatch):
    p = Problem("cos(x)", "-x^2", -1, 1)
    runs = []
    for threads in ("1", "3"):
        monkeypatch.setenv(THREADS_ENV, threads)
        s = sweep(p, 2, 60, 9, n_list=(16,))
        runs.append((s.integral_values.tobytes(), s.residuals.tobytes(), s.simpson_errors.tobytes()))
    assert runs[0] == runs[1]


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "2")
    assert worker_count() == 2
    for bad in ("0", "-1", "two"):
        monkeypatch.setenv(THREADS_ENV, bad)
        with pytest.raises(ValueError):
            worker_count()
    monkeypatch.delenv(THREADS_ENV)
    assert worker_count() >= 1


def test_rows_match_arrays(moment_sweep):
    rows = moment_sweep.rows()
    assert len(rows) == 25
    assert rows[3]["oracle"] == moment_sweep.integral_values[3]
    assert rows[3]["simpson_error_n512"] == moment_sweep.simpson_errors[3, 1]
