#!/usr/bin/env python3
"""
Tests for quadratic fields, ideal counting and the functional equation
"""

import itertools
import math

import numpy as np
import pytest

from smoothforge.errors import CapExceededError, DomainError
from smoothforge.quad_ideals.counting import (
    count_ideals,
    delta_lower,
    delta_profile,
    density_estimate,
    ideal_norms,
    ideal_of,
    lambda_KT,
    mertens_sum,
    psi_KT,
    s_theta,
    theorem5_bound,
    theorem5_exponent,
    verify_functional_equation,
)
from smoothforge.quad_ideals.fields import (
    EMPTY,
    ExcludedSet,
    IdealSpec,
    QuadField,
    SplitType,
    field_for,
    prime_ideals_up_to,
    splitting,
)
from smoothforge.smooth_q.sieve import psi


def test_field_data():
    assert QuadField(-1).discriminant == -4
    assert QuadField(-3).discriminant == -3
    assert QuadField(2).discriminant == 8
    assert QuadField(-1).class_number_one
    assert QuadField(-163).class_number_one
    assert not QuadField(-5).class_number_one
    assert field_for(1).name == "Q"
    assert field_for(-1).name == "Q(i)"
    with pytest.raises(DomainError):
        QuadField(12)
    with pytest.raises(DomainError):
        QuadField(0)


def test_splitting_in_gaussian_integers(gaussian):
    [two] = splitting(gaussian, 2)
    assert two.split_type is SplitType.RAMIFIED and two.norm == 2
    [three] = splitting(gaussian, 3)
    assert three.split_type is SplitType.INERT and three.norm == 9
    five = splitting(gaussian, 5)
    assert [ideal.split_type for ideal in five] == [SplitType.SPLIT, SplitType.SPLIT]
    assert [ideal.label for ideal in five] == ["5:1", "5:2"]
    with pytest.raises(DomainError):
        splitting(gaussian, 9)


def test_prime_ideals_up_to(gaussian):
    assert [ideal.norm for ideal in prime_ideals_up_to(gaussian, 10)] == [2, 5, 5, 9]
    T = ExcludedSet.from_labels(gaussian, ["5:2"])
    assert [ideal.label for ideal in prime_ideals_up_to(gaussian, 10, T)] == ["2:1", "5:1", "3:1"]


def test_excluded_labels(gaussian):
    T = ExcludedSet.from_labels(gaussian, ["2:1", " 5:1 "])
    assert T.labels == ["2:1", "5:1"]
    with pytest.raises(DomainError):
        ExcludedSet.from_labels(gaussian, ["3:2"])
    with pytest.raises(DomainError):
        ExcludedSet.from_labels(gaussian, ["two"])


def test_small_counts(gaussian):
    assert count_ideals(gaussian, 5) == 5
    assert count_ideals(gaussian, 5, ExcludedSet.from_labels(gaussian, ["2:1"])) == 3
    assert psi_KT(gaussian, 10, 2) == 4
    assert count_ideals(gaussian, 1) == 1


def test_rational_specialization(rationals, sieve):
    for X, Y in ((10 ** 4, 30), (5000, 2), (9999, 1000)):
        assert psi_KT(rationals, X, Y) == psi(sieve, X, Y).count


def test_enumeration_matches_count(eisenstein):
    T = ExcludedSet.from_labels(eisenstein, ["3:1"])
    norms = ideal_norms(eisenstein, 2000, 40, T)
    assert len(norms) == psi_KT(eisenstein, 2000, 40, T)
    assert np.all(np.diff(norms) >= 0)
    assert norms[0] == 1 and norms[-1] <= 2000


def test_gaussian_density(gaussian):
    assert density_estimate(gaussian, 10 ** 4) == pytest.approx(math.pi / 4, abs=0.02)


def test_count_cap(gaussian):
    with pytest.raises(CapExceededError):
        count_ideals(gaussian, 10 ** 6, cap=1000)


def test_mertens(gaussian):
    total, drift = mertens_sum(gaussian, 4)
    assert total == pytest.approx(0.75 * math.log(2))
    assert drift == pytest.approx(0.75 * math.log(2) - math.log(4))


def test_lambda(gaussian):
    two, three = splitting(gaussian, 2)[0], splitting(gaussian, 3)[0]
    assert lambda_KT(gaussian, IdealSpec.power(two, 3)) == pytest.approx(math.log(2))
    assert lambda_KT(gaussian, ideal_of([two, three])) == 0.0
    assert lambda_KT(gaussian, IdealSpec.power(two, 1), ExcludedSet.of([two])) == 0.0
    assert ideal_of([two, two, three]).norm == 36


@pytest.mark.parametrize("d,X,Y,labels", [
    (-1, 10 ** 4, 50, []),
    (-1, 10 ** 4, 50, ["2:1"]),
    (-3, 10 ** 3, 30, []),
    (1, 10 ** 5, 100, []),
])
def test_functional_equation(d, X, Y, labels):
    field = field_for(d)
    T = ExcludedSet.from_labels(field, labels)
    assert verify_functional_equation(field, X, Y, T) <= 1e-9


def test_functional_equation_domain(gaussian):
    with pytest.raises(DomainError):
        verify_functional_equation(gaussian, 10, 50)


def test_delta_lower(gaussian):
    assert delta_lower(gaussian, EMPTY, 10) == pytest.approx(0.5)
    assert delta_lower(gaussian, ExcludedSet.from_labels(gaussian, ["2:1"]), 2) == pytest.approx(0.5)


def test_s_theta_close_to_main_term(gaussian, rationals, table):
    for field, u, Y in ((gaussian, 3.0, 10 ** 3), (rationals, 2.0, 10 ** 4)):
        total, main = s_theta(field, u, Y, 1.0, EMPTY, table)
        assert abs(total - main) / main <= 0.15
    with pytest.raises(DomainError):
        s_theta(gaussian, 3.0, 100, 0.0, EMPTY, table)


def test_delta_profile(gaussian, table):
    profile = delta_profile(gaussian, EMPTY, 10, 3.0, table)
    assert profile.v[0] == 0.0 and profile.v[-1] == pytest.approx(3.0)
    assert profile.ratio[0] == pytest.approx(1.0)
    assert np.all(np.diff(profile.running_inf) <= 0)
    with pytest.raises(CapExceededError):
        delta_profile(gaussian, EMPTY, 100, 5.0, table, cap=10 ** 6)


def test_theorem5():
    X, Y = 1e9, 1e2
    assert theorem5_bound(X, Y, 1.0) == pytest.approx(math.exp(theorem5_exponent(X, Y, 1.0)))
    assert theorem5_bound(X, Y, 1.0) < X
    with pytest.raises(DomainError):
        theorem5_bound(1e4, 50, 1.0)


def gaussian_ideals_per_norm(limit: int) -> np.ndarray:
    """r(m) = sum over e | m of chi_{-4}(e), the number of ideals of Z[i] with norm m"""
    e = np.arange(limit + 1)
    chi = np.where(e % 2 == 0, 0, np.where(e % 4 == 1, 1, -1))
    r = np.zeros(limit + 1, dtype=np.int64)
    for divisor in range(1, limit + 1):
        r[divisor::divisor] += chi[divisor]
    return r


@pytest.mark.parametrize("labels", [[], ["2:1"]])
def test_gaussian_counts_match_divisor_sums(gaussian, labels):
    limit = 10 ** 4
    T = ExcludedSet.from_labels(gaussian, labels)
    r = gaussian_ideals_per_norm(limit)
    if labels:
        r[0::2] = 0
    expected = np.cumsum(r[1:])
    norms = ideal_norms(gaussian, limit, limit, T)
    counted = np.searchsorted(norms, np.arange(1, limit + 1), side="right")
    assert np.array_equal(counted, expected)
    for X in list(range(1, 200)) + list(range(200, limit + 1, 97)) + [limit]:
        assert count_ideals(gaussian, X, T) == expected[X - 1]


@pytest.mark.parametrize("d,labels,Y", [
    (-1, [], 10 ** 3),
    (-1, ["2:1"], 10 ** 4),
    (-1, [], 10 ** 4),
    (-3, [], 10 ** 3),
    (1, [], 10 ** 3),
])
def test_smooth_ideal_density(table, d, labels, Y):
    """psi_KT(X, Y) ~ A X rho(u) for u <= 2"""
    field = field_for(d)
    T = ExcludedSet.from_labels(field, labels)
    X = 10 ** 6
    u = math.log(X) / math.log(Y)
    A = density_estimate(field, X, T)
    assert abs(psi_KT(field, X, Y, T) / (A * X * table(u)) - 1) <= 0.2


def test_lambda_sums_to_log_norm(gaussian):
    """sum of Lambda(b) over the divisors b of a is log N(a)"""
    T = ExcludedSet.from_labels(gaussian, ["2:1"])
    primes = prime_ideals_up_to(gaussian, 300, T)
    ideals = []

    def extend(start, factorization, norm):
        ideals.append(IdealSpec(tuple(factorization)))
        for j in range(start, len(primes)):
            value = norm * primes[j].norm
            if value > 300:
                break
            exponent = 1
            while value <= 300:
                extend(j + 1, factorization + [(primes[j], exponent)], value)
                exponent += 1
                value *= primes[j].norm

    extend(0, [], 1)
    assert len(ideals) == count_ideals(gaussian, 300, T)
    for a in ideals:
        total = 0.0
        for exponents in itertools.product(*(range(e + 1) for _, e in a.factorization)):
            divisor = tuple((ideal, e) for (ideal, _), e in zip(a.factorization, exponents) if e)
            total += lambda_KT(gaussian, IdealSpec(divisor), T)
        assert total == pytest.approx(math.log(a.norm), abs=1e-12)


def test_smooth_counts_are_dominated(gaussian, eisenstein):
    for field, label in ((gaussian, "2:1"), (eisenstein, "3:1")):
        T = ExcludedSet.from_labels(field, [label])
        for X, Y in ((5000, 20), (5000, 300), (2000, 2000), (2000, 5000)):
            coprime, smooth, everything = psi_KT(field, X, Y, T), psi_KT(field, X, Y), count_ideals(field, X)
            assert coprime <= smooth <= everything
            if Y >= X:
                assert smooth == everything
                assert coprime == count_ideals(field, X, T)
            else:
                assert coprime < smooth < everything


def test_mertens_drift_settles(gaussian):
    _, near = mertens_sum(gaussian, 10 ** 5)
    _, far = mertens_sum(gaussian, 2 * 10 ** 5)
    assert abs(near - far) <= 0.05


def test_delta_lower_drops_without_two(gaussian):
    T = ExcludedSet.from_labels(gaussian, ["2:1"])
    assert delta_lower(gaussian, T, 30) < delta_lower(gaussian, EMPTY, 30)
