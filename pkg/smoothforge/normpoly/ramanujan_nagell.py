#!/usr/bin/env python3
"""
Generalised Ramanujan-Nagell equations |N(alpha_0 + x alpha_1)| = p_1^z_1 ... p_s^z_s
and the construction of alpha_0 with many solutions
"""

import logging
import math
import time
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel
from sympy import gcdex, primefactors

from smoothforge.bounds.evaluators import BoundQuery, thm3_bound, thm4_bound
from smoothforge.errors import CapExceededError, ConstructionError, DomainError
from smoothforge.normpoly.elements import (
    QuadElement,
    generates_field,
    half_integral,
    independent,
    is_irreducible,
    norm_form,
)
from smoothforge.normpoly.ordering import chebotarev_constant, order_primes
from smoothforge.quad_ideals.fields import QuadField
from smoothforge.smooth_q.sieve import SmoothSieve, factor, supported_on

logger = logging.getLogger(__name__)

DEFAULT_C2 = 2.0


class RNSolution(NamedTuple):
    x: int
    value: int
    exponents: Tuple[int, ...]


class RNCount(NamedTuple):
    count: int
    solutions: List[RNSolution]


def count_rn_solutions(alpha0: QuadElement, alpha1: QuadElement, S: Sequence[int],
                       x_bound: int, sieve: SmoothSieve) -> RNCount:
    """All |x| <= x_bound with f(x) != 0 supported on S, exponents listed in the order of sorted S"""
    if not independent(alpha0, alpha1):
        raise DomainError("alpha0 and alpha1 must be linearly independent")
    if x_bound < 0:
        raise DomainError(f"x_bound must be non-negative, got {x_bound}")
    form = norm_form(alpha0, alpha1)
    ceiling = abs(form.A) * x_bound * x_bound + abs(form.B) * x_bound + abs(form.C)
    if ceiling > sieve.limit:
        raise CapExceededError("sieve_limit", ceiling, sieve.limit, "largest |f(x)| in range")

    primes = sorted(set(int(p) for p in S))
    xs = np.arange(-x_bound, x_bound + 1, dtype=np.int64)
    values = np.abs(form.A * xs * xs + form.B * xs + form.C)
    mask = supported_on(sieve, values, primes)

    solutions = []
    for x, value in zip(xs[mask].tolist(), values[mask].tolist()):
        exponents = factor(sieve, value)
        solutions.append(RNSolution(x, value, tuple(exponents.get(p, 0) for p in primes)))
    return RNCount(len(solutions), solutions)


def thm4_degree(alpha0: QuadElement, alpha1: QuadElement, S: Sequence[int],
                x_bound: int, sieve: SmoothSieve) -> int:
    """Degree of the smallest nonzero polynomial vanishing on every solution x"""
    found = count_rn_solutions(alpha0, alpha1, S, x_bound, sieve)
    return len({solution.x for solution in found.solutions})


class NormConstructionReport(BaseModel):
    d: int
    s: int
    Y: int
    S: List[int]
    X: float
    C2: float
    scale: int
    kappa: Tuple[int, int]
    alpha0: Tuple[int, int]
    alpha1: Tuple[int, int]
    form: Tuple[int, int, int]
    total: int
    buckets: int
    count: int
    guaranteed: int
    bucket_histogram: Dict[int, int]
    solutions: List[int]
    independent: bool
    generates_field: bool
    irreducible: bool
    c_K: str
    thm3_exponent: Optional[float]
    thm4_exponent: Optional[float]


def _complement(p: int, q: int) -> Tuple[int, int]:
    """v2 with det(v1, v2) = 1 for primitive v1 = (p, q), chosen off the rational axis"""
    u, w, g = (int(value) for value in gcdex(p, q))
    if g < 0:
        u, w = -u, -w
    v2 = (-w, u)
    if v2[1] == 0:
        v2 = (v2[0] + p, v2[1] + q)
    return v2


def _box_rows(field: QuadField, radius: float):
    """Rows b with the a-range of elements whose conjugates stay within radius"""
    d = field.d
    if half_integral(field):
        root = math.sqrt(abs(d)) / 2
        shift = 0.5
    else:
        root = math.sqrt(abs(d))
        shift = 0.0
    b_max = int(math.floor(radius / root))
    for b in range(-b_max, b_max + 1):
        if d < 0:
            room = radius * radius - (b * root) ** 2
            if room < 0:
                continue
            centre, half = -b * shift, math.sqrt(room)
            low, high = centre - half, centre + half
        else:
            conj1, conj2 = b * (shift + root), b * (shift - root)
            low, high = max(-radius - conj1, -radius - conj2), min(radius - conj1, radius - conj2)
        a_low, a_high = math.ceil(low), math.floor(high)
        if a_low <= a_high:
            yield b, a_low, a_high


def construct_thm3(field: QuadField, alpha1: QuadElement, s: int, X: float, sieve: SmoothSieve,
                   C2: float = DEFAULT_C2, epsilon: float = 0.5,
                   enumeration_cap: int = 10_000_000) -> Tuple[QuadElement, NormConstructionReport]:
    """Pick alpha_0 so that |N(alpha_0 + x alpha_1)| is supported on the first s ordered primes for many x"""
    if not field.class_number_one:
        raise DomainError(f"{field.name} is not in the class-number-one list")
    if alpha1.field != field or alpha1.coords == (0, 0):
        raise DomainError("alpha1 must be a nonzero element of the field")
    if s < 1 or X < 1 or C2 <= 0:
        raise DomainError(f"need s >= 1, X >= 1 and C2 > 0, got s={s}, X={X}, C2={C2}")

    started = time.perf_counter()
    ordered = order_primes(field, s)
    S = sorted(ordered.primes)
    radius = C2 * math.sqrt(X)
    norm_ceiling = int(math.floor(radius * radius))
    if norm_ceiling > sieve.limit:
        raise CapExceededError("sieve_limit", norm_ceiling, sieve.limit, "norms in the box")
    smooth_norm = supported_on(sieve, np.arange(norm_ceiling + 1, dtype=np.int64), S)

    coords_a, coords_b = [], []
    found = 0
    for b, a_low, a_high in _box_rows(field, radius):
        a = np.arange(a_low, a_high + 1, dtype=np.int64)
        if half_integral(field):
            norms = a * a + a * b + (b * b * (1 - field.d)) // 4
        else:
            norms = a * a - field.d * b * b
        norms = np.abs(norms)
        keep = (norms >= 1) & (norms <= norm_ceiling)
        keep[keep] = smooth_norm[norms[keep]]
        coords_a.append(a[keep])
        coords_b.append(np.full(int(keep.sum()), b, dtype=np.int64))
        found += int(keep.sum())
        if found > enumeration_cap:
            raise CapExceededError("enumeration_cap", found, enumeration_cap, "smooth-norm elements")
    A = np.concatenate(coords_a) if coords_a else np.zeros(0, dtype=np.int64)
    B = np.concatenate(coords_b) if coords_b else np.zeros(0, dtype=np.int64)

    g = math.gcd(alpha1.a, alpha1.b)
    p, q = alpha1.a // g, alpha1.b // g
    v2 = _complement(p, q)
    x2 = p * B - q * A
    x1 = A * v2[1] - B * v2[0]
    off_line = x2 != 0
    if not np.any(off_line):
        raise ConstructionError("every bucket is empty: no smooth-norm element off the line of alpha1")
    keys, sizes = np.unique(x2[off_line], return_counts=True)
    winner = int(np.argmax(sizes))
    c = int(keys[winner])
    solutions = sorted(int(v) for v in x1[x2 == c])

    kappa = QuadElement(field, c * v2[0], c * v2[1])
    alpha0 = kappa.scale(g)
    missing = [r for r in primefactors(g) if r not in S]
    if missing:
        raise ConstructionError(f"primes {missing} of the scale d={g} lie outside S")
    form = norm_form(alpha0, alpha1)
    if not independent(alpha0, alpha1):
        raise ConstructionError(f"alpha0=({alpha0.as_text()}) is a rational multiple of alpha1")
    if not generates_field(alpha0):
        raise ConstructionError(f"alpha0=({alpha0.as_text()}) does not generate {field.name}")
    if not is_irreducible(form):
        raise ConstructionError(f"norm polynomial {tuple(form)} is reducible over Q")
    for x in solutions:
        value = abs(form(x))
        if value == 0 or any(r not in S for r in primefactors(value)):
            raise ConstructionError(f"x={x} does not give an S-supported norm")

    size_values, size_counts = np.unique(sizes, return_counts=True)
    c_K = chebotarev_constant(field)
    query = BoundQuery(n=2, m=1, s=max(s, 2), epsilon=epsilon, c_K=c_K)
    report = NormConstructionReport(
        d=field.d, s=s, Y=ordered.Y, S=S, X=X, C2=C2, scale=g,
        kappa=kappa.coords, alpha0=alpha0.coords, alpha1=alpha1.coords, form=tuple(form),
        total=int(off_line.sum()), buckets=len(keys), count=len(solutions),
        guaranteed=-(-int(off_line.sum()) // len(keys)),
        bucket_histogram={int(k): int(v) for k, v in zip(size_values, size_counts)},
        solutions=solutions,
        independent=independent(alpha0, alpha1), generates_field=generates_field(alpha0),
        irreducible=is_irreducible(form), c_K=f"{c_K.numerator}/{c_K.denominator}",
        thm3_exponent=thm3_bound(query).exponent if s >= 3 else None,
        thm4_exponent=thm4_bound(query).exponent if s >= 3 else None,
    )
    logger.info("norm construction in %s: %d elements, %d buckets, alpha0=(%s) with %d solutions (%.2fs)",
                field.name, report.total, len(keys), alpha0.as_text(), len(solutions),
                time.perf_counter() - started)
    return alpha0, report
