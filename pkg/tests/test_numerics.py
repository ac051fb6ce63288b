import math

import numpy as np
import pytest

from wpclink.numerics import (BracketError, ConvergenceError, DiffSpec,
                              QuadResult, find_root_bracketed, integrate_01,
                              maximize_quasiconcave, richardson_derivative)


def test_integrate_polynomial_exact():
    q = integrate_01(lambda y: 3.0 * y ** 2)
    assert q.value == pytest.approx(1.0, abs=1e-12)
    assert q.evaluations > 0


def test_integrate_polynomial_exactness_up_to_rule_degree():
    # the 15-point Kronrod rule integrates polynomials up to degree 22
    for deg in (5, 10, 15, 20, 22):
        exact = 1.0 / (deg + 1)
        q = integrate_01(lambda y, d=deg: y ** d, rel_tol=1e-12)
        assert q.value == pytest.approx(exact, rel=1e-13)


def test_integrate_log_endpoint_singularity():
    # int_0^1 -ln(1-y) dy = 1, improper at y = 1
    q = integrate_01(lambda y: -np.log1p(-y))
    assert q.value == pytest.approx(1.0, abs=1e-10)
    assert abs(q.value - 1.0) <= q.abs_err + 1e-13


def test_integrate_essential_decay_at_origin():
    # int_0^1 e^{-0.1/y}/y dy = E1(0.1); brute-force 1e7-point midpoint rule
    # gives 1.8229239584193924 (dev-frozen), analytic value 1.82292395841939
    q = integrate_01(lambda y: np.exp(-0.1 / y) / y)
    assert q.value == pytest.approx(1.8229239584193924, abs=1e-6)
    assert q.value == pytest.approx(1.8229239584193906, rel=1e-10)


def test_integrate_reports_error_and_evals():
    q = integrate_01(lambda y: np.sin(3.0 * y))
    exact = (1.0 - math.cos(3.0)) / 3.0
    assert abs(q.value - exact) <= max(q.abs_err, 1e-14)
    assert q.evaluations % 15 == 0


def test_integrate_breakpoints_catch_narrow_feature():
    # a 1e-5-wide bump hidden between the initial nodes
    center, width = 0.9995, 1e-5

    def bump(y):
        return np.exp(-((y - center) / width) ** 2)

    exact = width * math.sqrt(math.pi)
    q = integrate_01(bump, points=(center - width, center, center + width))
    assert q.value == pytest.approx(exact, rel=1e-8)


def test_integrate_budget_exhaustion_reports_best():
    with pytest.raises(ConvergenceError) as exc_info:
        integrate_01(lambda y: -np.log1p(-y), rel_tol=1e-15, abs_tol=0.0,
                     max_subdivisions=8)
    assert isinstance(exc_info.value.result, QuadResult)
    assert exc_info.value.result.value == pytest.approx(1.0, abs=1e-3)


def test_richardson_linear_order():
    d = richardson_derivative(lambda s: s * s, DiffSpec(order=1, point=1.0))
    assert d == pytest.approx(2.0, abs=1e-10)


def test_richardson_third_order_exponential():
    d = richardson_derivative(lambda s: math.exp(2.0 * s),
                              DiffSpec(order=3, point=0.0))
    assert d == pytest.approx(8.0, abs=1e-7)


def test_richardson_order_zero_passthrough():
    f = lambda s: math.sin(s) * 17.0
    assert richardson_derivative(f, DiffSpec(order=0, point=0.3)) == f(0.3)


def test_richardson_error_decreases_over_first_levels():
    # successive diagonal extrapolants must improve for analytic functions
    for f, df, x in [(lambda s: math.exp(1.3 * s), 1.3 * math.exp(1.3 * 0.4), 0.4),
                     (math.sin, math.cos(0.7), 0.7)]:
        errs = []
        for levels in (2, 3, 4):
            d = richardson_derivative(f, DiffSpec(order=1, point=x, h0=0.1,
                                                  levels=levels))
            errs.append(abs(d - df))
        assert errs[1] <= errs[0] and errs[2] <= errs[1]


def test_richardson_high_order():
    # d^6/ds^6 e^{2s} at 0 = 64
    d = richardson_derivative(lambda s: math.exp(2.0 * s),
                              DiffSpec(order=6, point=0.0))
    assert d == pytest.approx(64.0, rel=1e-6)


def test_root_linear():
    assert find_root_bracketed(lambda x: x - 0.5, 0.0, 1.0) == pytest.approx(0.5)


def test_root_quadratic_time_split():
    # tau^2 + beta tau - beta = 0 has root (-beta + sqrt(beta^2+4beta))/2
    beta = 0.2
    root = find_root_bracketed(lambda t: t * t + beta * t - beta, 1e-12, 1.0)
    closed = (-beta + math.sqrt(beta * beta + 4.0 * beta)) / 2.0
    assert root == pytest.approx(closed, abs=1e-10)
    assert root == pytest.approx(0.35826, abs=1e-5)


def test_root_cosine():
    assert find_root_bracketed(math.cos, 1.0, 2.0) == pytest.approx(math.pi / 2, abs=1e-10)


def test_root_requires_sign_change():
    with pytest.raises(BracketError):
        find_root_bracketed(lambda x: x * x + 1.0, -1.0, 1.0)


def test_root_stays_in_bracket_and_reduces_residual():
    g = lambda x: math.tanh(5.0 * (x - 0.3))
    lo, hi = -2.0, 4.0
    x = find_root_bracketed(g, lo, hi)
    assert lo <= x <= hi
    assert abs(g(x)) <= min(abs(g(lo)), abs(g(hi)))


def test_golden_quadratic():
    x, fx = maximize_quasiconcave(lambda x: -(x - 0.3) ** 2, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-6)


def test_golden_symmetric():
    x, fx = maximize_quasiconcave(lambda t: t * (1.0 - t), 0.0, 1.0)
    assert x == pytest.approx(0.5, abs=1e-6)
    assert fx == pytest.approx(0.25, abs=1e-10)


def test_golden_iteration_count():
    # the bracket shrinks by 1/phi each iteration; evaluations = iters + 3
    calls = [0]

    def f(t):
        calls[0] += 1
        return t * (1.0 - t)

    tol = 1e-6
    maximize_quasiconcave(f, 0.0, 1.0, tol=tol)
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    expected = math.ceil(math.log(tol) / math.log(invphi))
    assert abs((calls[0] - 3) - expected) <= 1


def test_diffspec_validation():
    with pytest.raises(ValueError):
        DiffSpec(order=13, point=0.0)
    with pytest.raises(ValueError):
        DiffSpec(order=1, point=0.0, levels=1)
    with pytest.raises(ValueError):
        DiffSpec(order=1, point=0.0, h0=-0.1)
