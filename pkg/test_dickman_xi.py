#!/usr/bin/env python3
"""
Tests for the rho table and the xi evaluator
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from smoothforge.dickman_xi.rho_table import (
    build_rho_table,
    composite_weights,
    identity_residual,
    rho,
    rho_integral,
)
from smoothforge.dickman_xi.xi import (
    lemma2_profile,
    rho_bounds_lemma2,
    rho_lower_explicit,
    rho_lower_exponent,
    xi,
    xi_array,
    xi_asymptotic,
    xi_cumulative,
    xi_integral,
)
from smoothforge.errors import DomainError, OutOfRangeError

RHO_3 = 0.0486083882911316


def test_plateau_is_exact(table):
    """rho is exactly 1 on [0, 1] and 0 below zero"""
    for u in (0.0, 0.25, 0.5, 1.0):
        assert rho(table, u) == 1.0
    assert rho(table, -0.5) == 0.0


def test_closed_forms(table):
    assert rho(table, 2.0) == pytest.approx(1 - math.log(2), abs=1e-6)
    assert rho(table, 1.5) == pytest.approx(1 - math.log(1.5), abs=1e-12)
    assert rho(table, 3.0) == pytest.approx(RHO_3, abs=1e-6)


def test_finer_step_agrees(table):
    fine = build_rho_table(Fraction(1, 4096), 4.0)
    for u in (2.5, 3.0, 3.75):
        assert rho(table, u) == pytest.approx(rho(fine, u), abs=1e-8)


@pytest.mark.parametrize("u", [1.5, 2.5, 5.0, 10.0, 20.0])
def test_integral_identity_residual(table, u):
    assert identity_residual(table, u) <= 1e-7


def test_positive_and_non_increasing(table):
    per_unit = table.per_unit
    window = table.values[per_unit:30 * per_unit + 1]
    assert np.all(window > 0)
    assert np.all(np.diff(window) <= 0)


def test_rho_integral_on_plateau(table):
    assert rho_integral(table, 0.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    # int_1^2 (1 - log t) dt = 2 - 2 log 2
    assert rho_integral(table, 1.0, 2.0) == pytest.approx(2 - 2 * math.log(2), abs=1e-6)


def _slope_growth(u: float) -> float:
    return 2 * u * math.log(u + 3) ** 2


@pytest.mark.parametrize("u", [2.0, 3.0, 5.0, 10.0])
def test_logarithmic_derivative_bound(table, u):
    """-rho'(u) <= rho(u) log(2u log^2(u+3))"""
    h = 1 / 256
    slope = -(rho(table, u + h) - rho(table, u - h)) / (2 * h)
    assert slope <= rho(table, u) * math.log(_slope_growth(u)) * (1 + 1e-6)


@pytest.mark.parametrize("u", [1.5, 3.0, 7.0])
@pytest.mark.parametrize("t", [0.0, 0.25, 0.5, 1.0])
def test_shifted_rho_bound(table, u, t):
    """rho(u - t) <= 4 rho(u) (2u log^2(u+3))^t"""
    assert rho(table, u - t) <= rho(table, u) * 4 * _slope_growth(u) ** t * (1 + 1e-9)


def test_out_of_range(table):
    with pytest.raises(OutOfRangeError):
        rho(table, table.u_max + 1)


def test_bad_step_rejected():
    with pytest.raises(DomainError):
        build_rho_table(Fraction(3, 1024), 8.0)
    with pytest.raises(DomainError):
        build_rho_table(Fraction(1, 16), 8.0)


def test_composite_weights_integrate_exactly():
    """Both the even and the odd panel rule integrate cubics exactly"""
    for panels in (8, 9):
        h = 1.0 / panels
        x = np.arange(panels + 1) * h
        assert composite_weights(panels, h) @ (x ** 3) == pytest.approx(0.25, abs=1e-13)


def test_xi_known_value(evaluator):
    value = xi(evaluator, 2.0)
    assert math.exp(value) == pytest.approx(1 + 2 * value, rel=1e-13)
    assert value == pytest.approx(1.2564312086, abs=1e-9)


def test_xi_residual_log_spaced(evaluator):
    for u in np.logspace(math.log10(1.01), 8, 50):
        value = xi(evaluator, float(u))
        assert evaluator.residual(float(u), value) <= 1e-12 * u


def test_xi_domain(evaluator):
    with pytest.raises(DomainError):
        xi(evaluator, 1.0)
    with pytest.raises(DomainError):
        xi(evaluator, math.inf)


def test_xi_array_matches_scalar(evaluator):
    u = np.array([0.5, 1.0, 2.0, 17.0, 1e6])
    values = xi_array(evaluator, u)
    assert values[0] == 0.0 and values[1] == 0.0
    for arg, value in zip(u[2:], values[2:]):
        assert value == pytest.approx(xi(evaluator, float(arg)), rel=1e-12)


def test_xi_slope_trend(evaluator):
    """u xi'(u) tends to 1"""
    h = 1e-4
    for u in (1e5, 1e6, 1e7, 1e8):
        slope = (xi(evaluator, u * (1 + h)) - xi(evaluator, u * (1 - h))) / (2 * h)
        assert abs(slope - 1) <= 0.1
    value = xi(evaluator, 1e3)
    h_slope = (xi(evaluator, 1e3 * (1 + h)) - xi(evaluator, 1e3 * (1 - h))) / (2 * h)
    assert abs(h_slope - 1) <= 1.05 / (value - 1)


def test_bootstrap_close_to_root(evaluator):
    for u in (1e3, 1e5, 1e8):
        ratio = math.log(math.log(u)) / math.log(u)
        assert abs(xi_asymptotic(u, 3) - xi(evaluator, u)) <= 2 * ratio ** 2
    assert xi_asymptotic(100.0, 1) == pytest.approx(math.log(100.0))
    assert xi_asymptotic(100.0, 2) == pytest.approx(math.log(100.0) + math.log(math.log(100.0)))


def test_xi_integral_and_cumulative(evaluator):
    assert xi_integral(evaluator, 3.0, 3.0) == 0.0
    whole = xi_integral(evaluator, 1.0, 3.0)
    running = xi_cumulative(evaluator, np.array([1.0, 2.0, 3.0]))
    assert running[0] == 0.0
    assert running[-1] == pytest.approx(whole, rel=1e-6)
    with pytest.raises(DomainError):
        xi_integral(evaluator, 0.5, 2.0)


def test_xi_integral_against_midpoint_rule(evaluator):
    a, b, panels = 1.5, 40.0, 20000
    h = (b - a) / panels
    mid = xi_array(evaluator, a + h * (np.arange(panels) + 0.5))
    assert xi_integral(evaluator, a, b) == pytest.approx(float(mid.sum()) * h, rel=1e-6)


def test_sandwich_at_points(evaluator, table):
    for u in (1.5, 4.0, 12.0):
        lower, upper = rho_bounds_lemma2(evaluator, u)
        assert lower <= rho(table, u) * (1 + 1e-8)
        assert rho(table, u) <= upper * (1 + 1e-8)


def test_sandwich_profile(evaluator, table):
    profile = lemma2_profile(evaluator, table, 30.0)
    assert profile.u[0] == 1.0 and profile.u[-1] == 30.0
    assert np.all(profile.lower <= profile.rho * (1 + 1e-8))
    assert np.all(profile.rho <= profile.upper * (1 + 1e-8))


def test_explicit_lower_exponent():
    assert rho_lower_explicit(10.0) == pytest.approx(math.exp(rho_lower_exponent(10.0)))
    with pytest.raises(DomainError):
        rho_lower_explicit(2.5)
    with pytest.raises(DomainError):
        rho_lower_exponent(1.0)
