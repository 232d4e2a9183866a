#!/usr/bin/env python3
"""
Vanishing degree of a point set and the box zero-count check

min_vanishing_degree finds the smallest total degree g for which a nonzero
polynomial vanishes on every point: the evaluation matrix against all
monomials of degree <= g must lose column rank. Rank is exact over QQ.
"""

import itertools
import logging
import math
from fractions import Fraction
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np
from sympy import Poly, symbols
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from smoothforge.errors import CapExceededError, DomainError

logger = logging.getLogger(__name__)

DEFAULT_WORK_CAP = 10_000_000


def monomial_exponents(dimension: int, degree: int) -> List[Tuple[int, ...]]:
    """Exponent vectors of every monomial of total degree <= degree"""
    exponents = []
    for total in range(degree + 1):
        for combo in itertools.combinations_with_replacement(range(dimension), total):
            vector = [0] * dimension
            for var in combo:
                vector[var] += 1
            exponents.append(tuple(vector))
    return exponents


def evaluation_rank(points: Sequence[Tuple[Fraction, ...]], degree: int) -> Tuple[int, int]:
    """(rank, number of monomials) of the evaluation matrix in degree <= degree"""
    exponents = monomial_exponents(len(points[0]), degree)
    rows = []
    for point in points:
        row = []
        for vector in exponents:
            value = Fraction(1)
            for coord, power in zip(point, vector):
                if power:
                    value *= coord ** power
            row.append(QQ(value.numerator, value.denominator))
        rows.append(row)
    matrix = DomainMatrix(rows, (len(points), len(exponents)), QQ)
    return matrix.rank(), len(exponents)


def min_vanishing_degree(points: Sequence[Sequence[Fraction]], cap: int = DEFAULT_WORK_CAP) -> int:
    """Smallest g with a nonzero polynomial of degree <= g vanishing on all points; 0 for no points"""
    distinct = sorted(set(tuple(Fraction(c) for c in point) for point in points))
    if not distinct:
        return 0
    dimension = len(distinct[0])
    if dimension < 1 or any(len(point) != dimension for point in distinct):
        raise DomainError("points must share a positive dimension")
    if dimension == 1:
        # k distinct values: the Vandermonde matrix has full rank up to degree k - 1
        return len(distinct)

    def vanishes(degree: int) -> bool:
        columns = math.comb(degree + dimension, dimension)
        if columns * len(distinct) > cap:
            raise CapExceededError("enumeration_cap", columns * len(distinct), cap,
                                   f"evaluation matrix in degree {degree}")
        rank, columns = evaluation_rank(distinct, degree)
        return rank < columns

    # a product of one linear form per point vanishes, so the answer is at most k;
    # vanishing in degree g implies vanishing in every degree above g
    low, high = 0, 1
    while high < len(distinct) and not vanishes(high):
        low, high = high, min(2 * high, len(distinct))
    while high - low > 1:
        mid = (low + high) // 2
        if vanishes(mid):
            high = mid
        else:
            low = mid
    logger.debug("%d points in dimension %d vanish in degree %d", len(distinct), dimension, high)
    return high


class Lemma6Result(NamedTuple):
    zeros: int
    bound: int
    ok: bool


def lemma6_check(Q: Poly, A: int, B: int, cap: int = DEFAULT_WORK_CAP) -> Lemma6Result:
    """Integer zeros of Q in [A, B]^m against deg(Q) * (B - A + 1)^(m - 1)"""
    if Q.is_zero:
        raise DomainError("the polynomial must not be identically zero")
    if B < A:
        raise DomainError(f"empty box [{A}, {B}]")
    m = len(Q.gens)
    side = B - A + 1
    if side ** m > cap:
        raise CapExceededError("enumeration_cap", side ** m, cap, "box points")

    _, integral = Q.clear_denoms(convert=True)
    axis = np.arange(A, B + 1, dtype=object)
    grids = np.meshgrid(*([axis] * m), indexing="ij")
    values = np.zeros(grids[0].shape, dtype=object)
    for monomial, coefficient in integral.terms():
        term = np.full(grids[0].shape, int(coefficient), dtype=object)
        for grid, power in zip(grids, monomial):
            if power:
                term = term * grid ** power
        values = values + term

    zeros = int(np.count_nonzero(values == 0))
    bound = Q.total_degree() * side ** (m - 1)
    return Lemma6Result(zeros, bound, zeros <= bound)


def _random_dense(rng: np.random.Generator, gens, degree: int) -> Poly:
    exponents = monomial_exponents(len(gens), degree)
    while True:
        coefficients = rng.integers(-3, 4, size=len(exponents))
        if np.any(coefficients[1:]):
            break
    terms = {vector: int(c) for vector, c in zip(exponents, coefficients) if c}
    return Poly.from_dict(terms, *gens, domain=QQ)


def _random_linear_product(rng: np.random.Generator, gens, degree: int) -> Poly:
    product = Poly(1, *gens, domain=QQ)
    for _ in range(degree):
        while True:
            slopes = rng.integers(-2, 3, size=len(gens))
            if np.any(slopes):
                break
        offset = int(rng.integers(-3, 4))
        form = Poly(offset + sum(int(c) * g for c, g in zip(slopes, gens)), *gens, domain=QQ)
        product = product * form
    return product


class FuzzReport(NamedTuple):
    trials: int
    violations: int
    worst_ratio: float
    seed: int


def lemma6_fuzz(trials: int, seed: int, degree: int = 4, m: int = 2,
                box: Tuple[int, int] = (-5, 5)) -> FuzzReport:
    """Random nonzero polynomials, half dense and half products of linear forms"""
    if trials < 1 or degree < 1 or m < 1:
        raise DomainError("trials, degree and m must be positive")
    rng = np.random.default_rng(seed)
    gens = symbols(f"X1:{m + 1}")
    low, high = box
    violations = 0
    worst = 0.0
    for trial in range(trials):
        d = int(rng.integers(1, degree + 1))
        if trial % 2 == 0:
            Q = _random_dense(rng, gens, d)
        else:
            Q = _random_linear_product(rng, gens, d)
        result = lemma6_check(Q, low, high)
        if not result.ok:
            violations += 1
            logger.warning("zero count %d above %d for %s", result.zeros, result.bound, Q.as_expr())
        if result.bound:
            worst = max(worst, result.zeros / result.bound)
    return FuzzReport(trials, violations, worst, seed)
