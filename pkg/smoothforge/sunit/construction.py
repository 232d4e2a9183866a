#!/usr/bin/env python3
"""
Pigeonhole construction of a coefficient-one equation with many S-unit solutions

With T the first t primes and Y = p_t, every tuple of Y-smooth m_i <= X gives
sum |a_i| m_i = a_0. The most popular value a_0 turns its tuples into
solutions x_i = eps_i m_i / a_0 of a_1 x_1 + ... + a_n x_n = 1 over
S = T u primes(a_0), padded to s primes.

construct_thm2 lifts the two-variable family to n variables and measures the
smallest degree of a polynomial vanishing on the result.
"""

import logging
import math
import time
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from scipy.signal import fftconvolve
from sympy import prime

from smoothforge.bounds.evaluators import (
    BoundQuery,
    lemma8_choose_X,
    lemma8_guarantee,
    thm1_bound,
    thm2_bound,
    thm2_t,
)
from smoothforge.errors import CapExceededError, ConstructionError, DomainError
from smoothforge.rationals import format_fraction
from smoothforge.smooth_q.sieve import SmoothSieve, psi_enumerate
from smoothforge.sunit.degree import min_vanishing_degree
from smoothforge.sunit.units import (
    SUnitInstance,
    Solution,
    check_nondegenerate,
    coefficient_primes,
    first_primes,
    lift_tower,
    pad_primes,
    rescale_solutions,
    s_unit_exponents,
    theorem2_prime_set,
    verify_solution,
)

logger = logging.getLogger(__name__)

DEFAULT_BUCKET_CAP = 10_000_000
EXACT_FLOAT_COUNT = 2 ** 52


class ConstructionReport(BaseModel):
    n: int
    s: int
    epsilon: float
    t: int
    Y: int
    X: float
    X_lemma8: float
    X_capped: bool
    a: List[str]
    a0: str
    psi: int
    total: int
    buckets: int
    bucket_size: int
    guaranteed: int
    bucket_histogram: Dict[int, int]
    T: List[int]
    R: List[int]
    S: List[int]
    thm1_exponent: Optional[float]
    lemma8_exponent: float


def _signed_weights(a: Sequence[Fraction]) -> Tuple[List[int], int, List[int]]:
    """Integer weights |a_i| * L with L the lcm of the denominators, and the signs eps_i"""
    scale = 1
    for value in a:
        scale = scale * value.denominator // math.gcd(scale, value.denominator)
    weights = [int(abs(value) * scale) for value in a]
    signs = [1 if value > 0 else -1 for value in a]
    return weights, scale, signs


def _sum_histogram(values: np.ndarray, weights: Sequence[int], top: int) -> np.ndarray:
    """Number of tuples (m_1, ..., m_n) of the given values with each possible sum of w_i m_i"""
    histogram = np.ones(1)
    for weight in weights:
        indicator = np.zeros(weight * top + 1)
        indicator[weight * values] = 1.0
        # float64 FFT error stays far below 1/2 while every count is under
        # EXACT_FLOAT_COUNT, so rounding recovers the exact integers; the
        # caller checks the histogram total and recounts the winning bucket
        histogram = np.rint(fftconvolve(histogram, indicator))
    return histogram.astype(np.int64)


def _tuples_with_sum(values: np.ndarray, weights: Sequence[int], top: int,
                     target: int) -> Iterator[Tuple[int, ...]]:
    """All tuples of values with sum of w_i m_i equal to target, depth first"""
    member = np.zeros(top + 1, dtype=bool)
    member[values] = True
    tail_minimum = [sum(weights[i + 1:]) for i in range(len(weights))]
    ordered = [int(m) for m in values]

    def extend(prefix: Tuple[int, ...], remaining: int) -> Iterator[Tuple[int, ...]]:
        i = len(prefix)
        weight = weights[i]
        if i == len(weights) - 1:
            m, rest = divmod(remaining, weight)
            if rest == 0 and 1 <= m <= top and member[m]:
                yield prefix + (m,)
            return
        for m in ordered:
            rest = remaining - weight * m
            if rest < tail_minimum[i]:
                break
            yield from extend(prefix + (m,), rest)

    return extend((), target)


def construct_thm1(a: Sequence[Fraction], s: int, epsilon: float, sieve: SmoothSieve,
                   enumeration_cap: int = 10_000_000,
                   bucket_cap: int = DEFAULT_BUCKET_CAP) -> Tuple[ConstructionReport, List[Solution]]:
    """Run the construction; every returned solution is verified"""
    a = [Fraction(value) for value in a]
    n = len(a)
    if n < 2 or any(value == 0 for value in a):
        raise DomainError("need at least two nonzero coefficients")
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    t = math.floor((1 - epsilon / 2) * s)
    if t < 1:
        raise DomainError(f"s={s} with epsilon={epsilon} leaves no primes (t={t})")

    started = time.perf_counter()
    T = first_primes(t)
    Y = int(prime(t))
    choice = lemma8_choose_X(Y, 1 / n)
    X = min(choice.X, float(sieve.limit))
    capped = choice.X > sieve.limit
    if capped:
        logger.info("X=%.6g from the choice of X exceeds the sieve; using %d", choice.X, sieve.limit)

    values = psi_enumerate(sieve, X, Y, enumeration_cap)
    count = len(values)
    total = count ** n
    top = int(X)

    weights, scale, signs = _signed_weights(a)
    span = sum(weights) * top + 1
    if span > bucket_cap:
        raise CapExceededError("bucket_cap", span, bucket_cap, "possible values of sum |a_i| m_i")
    if total >= EXACT_FLOAT_COUNT:
        raise CapExceededError("bucket_cap", total, EXACT_FLOAT_COUNT, f"psi^{n} tuples")

    histogram = _sum_histogram(values, weights, top)
    if int(histogram.sum()) != total:
        raise ConstructionError("bucket histogram does not partition the tuples")
    occupied = histogram[histogram > 0]
    winner = int(np.argmax(histogram))
    a0 = Fraction(winner, scale)
    bucket_size = int(histogram[winner])
    size_values, size_counts = np.unique(occupied, return_counts=True)

    R = coefficient_primes([a0])
    union = set(T) | set(R)
    if len(union) > s:
        raise ConstructionError(f"|T u R| = {len(union)} exceeds s = {s} for a0 = {a0}")
    S = pad_primes(union, s, Y)

    inst = SUnitInstance(tuple(a), tuple(S))
    solutions = sorted(
        Solution(tuple(Fraction(sign * m) / a0 for sign, m in zip(signs, coords)))
        for coords in _tuples_with_sum(values, weights, top, winner)
    )
    if len(solutions) != bucket_size:
        raise ConstructionError(f"bucket of {a0} holds {bucket_size} tuples, recovered {len(solutions)}")
    for sol in solutions:
        if not (verify_solution(inst, sol) and check_nondegenerate(inst, sol)):
            raise ConstructionError(f"constructed tuple {sol.x} failed verification")

    report = ConstructionReport(
        n=n, s=s, epsilon=epsilon, t=t, Y=Y, X=X, X_lemma8=choice.X, X_capped=capped,
        a=[format_fraction(value) for value in a], a0=format_fraction(a0),
        psi=count, total=total, buckets=len(occupied), bucket_size=bucket_size,
        guaranteed=-(-total // len(occupied)),
        bucket_histogram={int(k): int(v) for k, v in zip(size_values, size_counts)},
        T=T, R=R, S=S,
        thm1_exponent=thm1_bound(BoundQuery(n=n, s=s, epsilon=epsilon)).exponent if s >= 3 else None,
        lemma8_exponent=lemma8_guarantee(Y, 1 / n),
    )
    logger.info("construction n=%d s=%d: psi=%d, %d buckets, winner a0=%s holds %d tuples (%.2fs)",
                n, s, count, len(occupied), a0, bucket_size, time.perf_counter() - started)
    return report, solutions


class VanishingReport(BaseModel):
    n: int
    s: int
    epsilon: float
    t: int
    a: List[str]
    T: List[int]
    R: List[int]
    S: List[int]
    pairs: int
    lifted: int
    max_exponent: int
    g: int
    thm2_exponent: float
    thm2_value: Optional[float]
    pair_construction: ConstructionReport


def construct_thm2(a: Sequence[Fraction], s: int, epsilon: float, sieve: SmoothSieve,
                   enumeration_cap: int = 10_000_000, bucket_cap: int = DEFAULT_BUCKET_CAP,
                   ) -> Tuple[VanishingReport, List[Solution]]:
    """Solutions of sum a_i x_i = 1 lifted from a two-variable family, and the degree g they force

    The pairs z_1 + z_2 = 1 come from construct_thm1 over t primes T. Lifting
    gives all-ones solutions in T-units, x_i = y_i/a_i rescales them, and S
    is T plus the coefficient primes padded to s. g is the smallest degree of
    a nonzero polynomial in x_1..x_{n-1} vanishing on every projection.
    """
    a = [Fraction(value) for value in a]
    n = len(a)
    if n < 2 or any(value == 0 for value in a):
        raise DomainError("need at least two nonzero coefficients")
    if not 0 < epsilon < 1:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")

    started = time.perf_counter()
    t = thm2_t(s, epsilon)
    pair_report, pairs = construct_thm1((Fraction(1), Fraction(1)), t, epsilon, sieve,
                                        enumeration_cap, bucket_cap)
    choice = theorem2_prime_set(a, s, epsilon, T=pair_report.S)

    lifted_size = len(pairs) ** (n - 1)
    if lifted_size > bucket_cap:
        raise CapExceededError("bucket_cap", lifted_size, bucket_cap, f"lifted {n}-tuples")
    lifted = lift_tower([sol.x for sol in pairs], n)
    solutions = sorted(rescale_solutions(a, lifted))

    inst = SUnitInstance(tuple(a), tuple(choice.S))
    max_exponent = 0
    for sol in solutions:
        if not verify_solution(inst, sol):
            raise ConstructionError(f"lifted tuple {sol.x} failed verification")
        for xi in sol.x:
            exponents = s_unit_exponents(xi, choice.S).values()
            max_exponent = max(max_exponent, max(abs(e) for e in exponents))

    g = min_vanishing_degree([sol.x[:-1] for sol in solutions], enumeration_cap)
    bound = thm2_bound(s, epsilon)
    report = VanishingReport(
        n=n, s=s, epsilon=epsilon, t=choice.t, a=[format_fraction(value) for value in a],
        T=choice.T, R=choice.R, S=choice.S, pairs=len(pairs), lifted=len(solutions),
        max_exponent=max_exponent, g=g, thm2_exponent=bound.exponent, thm2_value=bound.value,
        pair_construction=pair_report,
    )
    logger.info("vanishing construction n=%d s=%d: %d pairs lift to %d solutions, g=%d (%.2fs)",
                n, s, len(pairs), len(solutions), g, time.perf_counter() - started)
    return report, solutions
