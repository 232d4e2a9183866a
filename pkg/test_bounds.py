#!/usr/bin/env python3
"""
Tests for the closed-form lower bounds and the choice of X given Y
"""

import math
from fractions import Fraction

import pytest

from smoothforge.bounds.evaluators import (
    BoundQuery,
    BoundValue,
    cep_bound,
    lemma8_choose_X,
    lemma8_guarantee,
    rho_style_bound,
    thm1_bound,
    thm2_bound,
    thm2_t,
    thm3_bound,
    thm4_bound,
)
from smoothforge.dickman_xi.xi import rho_lower_explicit
from smoothforge.errors import DomainError


def test_thm1_direct():
    q = BoundQuery(n=3, s=100, epsilon=0.5)
    expected = 0.5 * 4.5 * 100 ** (2 / 3) * math.log(100) ** (-1 / 3)
    assert thm1_bound(q).exponent == pytest.approx(expected)
    assert thm1_bound(BoundQuery(n=2, s=50, epsilon=1.0)).value == 1.0


def test_thm2_direct():
    assert thm2_bound(100, 0.5).exponent == pytest.approx(3.5 * 10 / math.sqrt(math.log(100)))
    assert thm2_bound(100, 4.0).value == 1.0
    with pytest.raises(DomainError):
        thm2_bound(100, 4.5)


def test_thm2_t():
    assert thm2_t(12, 0.5) == 11
    assert thm2_t(100, 0.5) == math.floor((3.5 / 3.75) ** 2 * 100) + 1


def test_thm3_normal_quadratic():
    q = BoundQuery(n=2, m=1, s=64, epsilon=0.25, c_K=Fraction(2))
    expected = 0.75 * 2 * math.sqrt(2 * 64) / math.sqrt(math.log(64))
    assert thm3_bound(q).exponent == pytest.approx(expected)


def test_thm3_equals_thm4_at_m_one():
    for n, c_K in ((2, "2"), (3, "3"), (5, "7/2")):
        q = BoundQuery(n=n, m=1, s=200, epsilon=0.3, c_K=c_K)
        assert thm3_bound(q).exponent == pytest.approx(thm4_bound(q).exponent)


def test_monotone_in_s_and_epsilon():
    for evaluator in (thm1_bound, thm3_bound, thm4_bound):
        in_s = [evaluator(BoundQuery(n=3, m=2, s=s, epsilon=0.5, c_K=3)).exponent
                for s in (10, 20, 50, 100, 1000)]
        assert in_s == sorted(in_s) and len(set(in_s)) == len(in_s)
        in_eps = [evaluator(BoundQuery(n=3, m=2, s=100, epsilon=eps, c_K=3)).exponent
                  for eps in (0.0, 0.25, 0.5, 0.75, 1.0)]
        assert in_eps == sorted(in_eps, reverse=True) and len(set(in_eps)) == len(in_eps)


def test_query_validation():
    with pytest.raises(ValueError):
        BoundQuery(n=2, c_K=3)
    with pytest.raises(ValueError):
        BoundQuery(n=3, m=3)
    with pytest.raises(ValueError):
        BoundQuery(epsilon=1.5)
    with pytest.raises(DomainError):
        thm1_bound(BoundQuery(s=2))


def test_overflowing_value_is_omitted():
    big = BoundValue.of(1000.0)
    assert big.value is None and big.exponent == 1000.0
    assert BoundValue.of(0.0).value == 1.0


def test_cep_collapses_to_explicit_rho():
    X, Y = 1e10, 1e3
    u = math.log(X) / math.log(Y)
    assert cep_bound(X, Y, 0.0).value == pytest.approx(X * rho_lower_explicit(u), rel=1e-12)
    assert cep_bound(X, Y, 1.0).value < cep_bound(X, Y, 0.0).value
    with pytest.raises(DomainError):
        cep_bound(1e4, 50, 1.0)
    with pytest.raises(DomainError):
        cep_bound(1e9, 2, 1.0)


def test_rho_style_bound_for_small_u():
    assert rho_style_bound(1e4, 50, 1.0).value > 0
    with pytest.raises(DomainError):
        rho_style_bound(100, 100, 1.0)


def test_lemma8_known_roots():
    choice = lemma8_choose_X(100, 0.5)
    assert choice.u * math.log(choice.u) == pytest.approx(10.0, rel=1e-10)
    assert choice.u == pytest.approx(5.729, abs=1e-3)
    assert choice.X == pytest.approx(100 ** choice.u)
    # Y^(1/2) = e gives u log u = e, whose root is e
    assert lemma8_choose_X(math.e ** 2, 0.5).u == pytest.approx(math.e, rel=1e-10)


@pytest.mark.parametrize("Y", [1e2, 1e3, 1e4])
@pytest.mark.parametrize("alpha", [1 / 2, 2 / 3])
def test_lemma8_display_holds(Y, alpha):
    choice = lemma8_choose_X(Y, alpha)
    target = Y ** (1 - alpha)
    assert abs(choice.u * math.log(choice.u) - target) <= 1e-10 * target
    assert choice.holds
    assert choice.log_X <= 2 / (1 - alpha) * target


def test_lemma8_domain():
    with pytest.raises(DomainError):
        lemma8_choose_X(2, 0.5)
    with pytest.raises(DomainError):
        lemma8_choose_X(100, 1.0)
    assert lemma8_guarantee(100, 0.5) == pytest.approx(10 / (0.5 * math.log(100)))
