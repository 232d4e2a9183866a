#!/usr/bin/env python3
"""
Ideal counting: N_{K,T}, psi_{K,T}, the von Mangoldt analogue and the
quantities built on them (Mertens-type sums, the functional equation,
S_theta, Delta and the delta profile)

Counting and enumeration walk prime-ideal exponent vectors depth first in
norm order, pruning at the norm bound.
"""

import bisect
import logging
import math
import time
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from smoothforge.dickman_xi.rho_table import RhoTable
from smoothforge.dickman_xi.xi import rho_lower_exponent
from smoothforge.errors import CapExceededError, DomainError
from smoothforge.quad_ideals.fields import (
    EMPTY,
    ExcludedSet,
    Field,
    IdealSpec,
    PrimeIdealSpec,
    prime_ideals_up_to,
)

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_CAP = 10_000_000


def _count_from(norms: Sequence[int], start: int, limit: int) -> int:
    """Ideals composed of norms[start:] with norm <= limit, the unit ideal included"""
    total = 1
    reachable = bisect.bisect_right(norms, limit, lo=start)
    j = start
    # past the square root only single prime ideals fit
    while j < reachable and norms[j] * norms[j] <= limit:
        q = norms[j]
        power = q
        while power <= limit:
            total += _count_from(norms, j + 1, limit // power)
            power *= q
        j += 1
    return total + (reachable - j)


def _enumerate_from(norms: Sequence[int], start: int, current: int, bound: int,
                    out: List[int]) -> None:
    out.append(current)
    for j in range(start, len(norms)):
        q = norms[j]
        value = current * q
        if value > bound:
            break
        while value <= bound:
            _enumerate_from(norms, j + 1, value, bound, out)
            value *= q


def _generator_norms(field: Field, X: float, Y: float, T: ExcludedSet) -> List[int]:
    return [ideal.norm for ideal in prime_ideals_up_to(field, min(X, Y), T)]


def count_ideals(field: Field, X: float, T: ExcludedSet = EMPTY,
                 cap: int = DEFAULT_ENUMERATION_CAP) -> int:
    """N_{K,T}(X): ideals of norm <= X coprime with every member of T"""
    if X < 1:
        raise DomainError(f"X must be at least 1, got {X}")
    if X > cap:
        raise CapExceededError("enumeration_cap", X, cap, "ideal count bound")
    return psi_KT(field, X, X, T)


def psi_KT(field: Field, X: float, Y: float, T: ExcludedSet = EMPTY) -> int:
    """Ideals of norm <= X built from prime ideals of norm <= Y outside T"""
    if X < 1 or Y < 1:
        raise DomainError(f"need X >= 1 and Y >= 1, got X={X}, Y={Y}")
    norms = _generator_norms(field, X, Y, T)
    return _count_from(norms, 0, int(math.floor(X)))


def ideal_norms(field: Field, X: float, Y: float, T: ExcludedSet = EMPTY,
                cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Sorted norms of every ideal counted by psi_KT(field, X, Y, T)"""
    count = psi_KT(field, X, Y, T)
    if count > cap:
        raise CapExceededError("enumeration_cap", count, cap, "ideals to enumerate")
    started = time.perf_counter()
    out: List[int] = []
    _enumerate_from(_generator_norms(field, X, Y, T), 0, 1, int(math.floor(X)), out)
    norms = np.sort(np.asarray(out, dtype=np.int64))
    logger.debug("enumerated %d ideals of %s up to %g in %.2fs", len(norms), field.name, X,
                 time.perf_counter() - started)
    return norms


def density_estimate(field: Field, X: float, T: ExcludedSet = EMPTY,
                     cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """Empirical A_{K,T} = N_{K,T}(X)/X"""
    return count_ideals(field, X, T, cap) / X


def lambda_KT(field: Field, a: IdealSpec, T: ExcludedSet = EMPTY) -> float:
    """log N(p) when a = p^m with p outside T, else 0"""
    if len(a.factorization) != 1:
        return 0.0
    ideal, _ = a.factorization[0]
    if ideal in T:
        return 0.0
    return math.log(ideal.norm)


class PrimePower(NamedTuple):
    norm: int
    weight: float


def prime_powers(field: Field, bound: float, Y: float, T: ExcludedSet = EMPTY) -> List[PrimePower]:
    """Prime-power ideals p^m of norm <= bound with N(p) <= Y, p outside T, and Lambda(p^m)"""
    powers = []
    for ideal in prime_ideals_up_to(field, min(bound, Y), T):
        weight = math.log(ideal.norm)
        value = ideal.norm
        while value <= bound:
            powers.append(PrimePower(value, weight))
            value *= ideal.norm
    powers.sort()
    return powers


def mertens_sum(field: Field, Y: float, T: ExcludedSet = EMPTY) -> Tuple[float, float]:
    """(sum of Lambda(a)/N(a) over N(a) <= Y, that sum minus log Y)"""
    if Y <= 0:
        raise DomainError(f"Y must be positive, got {Y}")
    total = math.fsum(pp.weight / pp.norm for pp in prime_powers(field, Y, Y, T))
    return total, total - math.log(Y)


class FunctionalEquationTerms(NamedTuple):
    count: int
    lhs: float
    integral: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - (self.integral + self.rhs)) / self.lhs


def functional_equation_terms(field: Field, X: float, Y: float, T: ExcludedSet = EMPTY,
                              cap: int = DEFAULT_ENUMERATION_CAP) -> FunctionalEquationTerms:
    """Both sides of psi log X = int_1^X psi(t)/t dt + sum Lambda(a) psi(X/N(a))"""
    if not X >= Y >= 2:
        raise DomainError(f"need X >= Y >= 2, got X={X}, Y={Y}")
    norms = ideal_norms(field, X, Y, T, cap)
    top = int(math.floor(X))
    log_x = math.log(X)

    lhs = len(norms) * log_x
    # psi(t)/t is a step function: each counted ideal adds log(X/N(a))
    integral = math.fsum(log_x - np.log(norms.astype(np.float64)))

    sorted_norms = norms.tolist()
    rhs = math.fsum(pp.weight * bisect.bisect_right(sorted_norms, top // pp.norm)
                    for pp in prime_powers(field, X, Y, T))
    return FunctionalEquationTerms(len(norms), lhs, integral, rhs)


def verify_functional_equation(field: Field, X: float, Y: float, T: ExcludedSet = EMPTY,
                               cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """Relative residual |LHS - RHS|/LHS of the functional equation"""
    return functional_equation_terms(field, X, Y, T, cap).residual


def delta_lower(field: Field, T: ExcludedSet, Y_probe: float,
                cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """inf over 1 <= y <= Y_probe of N_{K,T}(y)/y, taken just below each jump"""
    if Y_probe < 2:
        raise DomainError(f"Y_probe must be at least 2, got {Y_probe}")
    norms = ideal_norms(field, Y_probe, Y_probe, T, cap)
    jumps, counts = np.unique(norms, return_counts=True)
    running = np.cumsum(counts)
    ratios = running[:-1] / jumps[1:]
    tail = running[-1] / Y_probe
    return float(min(ratios.min(), tail)) if len(ratios) else float(tail)


def s_theta(field: Field, u: float, Y: float, theta: float, T: ExcludedSet,
            table: RhoTable) -> Tuple[float, float]:
    """(S_theta summed over prime-power ideals, log Y * int_0^theta rho(u - v) dv)"""
    if not 0 < theta <= 1:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    if u < 1 or Y < 2:
        raise DomainError(f"need u >= 1 and Y >= 2, got u={u}, Y={Y}")
    log_y = math.log(Y)
    bound = Y ** theta
    total = math.fsum(pp.weight / pp.norm * table(u - math.log(pp.norm) / log_y)
                      for pp in prime_powers(field, bound, bound, T))
    main = log_y * table.integral(u - theta, u)
    return total, main


class DeltaProfile(NamedTuple):
    v: np.ndarray
    ratio: np.ndarray
    running_inf: np.ndarray


def delta_profile(field: Field, T: ExcludedSet, Y: float, u_max: float, table: RhoTable,
                  grid_step: float = 1 / 32, cap: int = DEFAULT_ENUMERATION_CAP) -> DeltaProfile:
    """psi_{K,T}(Y^v, Y)/(Y^v rho(v)) on a grid of v in [0, u_max] with its running infimum"""
    if Y < 2 or u_max < 1:
        raise DomainError(f"need Y >= 2 and u_max >= 1, got Y={Y}, u_max={u_max}")
    top = Y ** u_max
    if top > cap:
        raise CapExceededError("enumeration_cap", top, cap, "Y^u_max")
    norms = ideal_norms(field, top, Y, T, cap)

    steps = int(math.floor(u_max / grid_step + 1e-9))
    v = np.arange(steps + 1, dtype=np.float64) * grid_step
    reach = np.floor(Y ** v * (1 + 1e-12))
    counts = np.searchsorted(norms, reach, side="right")
    ratio = counts / (Y ** v * table.evaluate(v))
    return DeltaProfile(v, ratio, np.minimum.accumulate(ratio))


def theorem5_exponent(X: float, Y: float, C: float) -> float:
    """log of theorem5_bound, finite where the bound itself underflows"""
    if X <= 1 or Y <= 1:
        raise DomainError(f"need X > 1 and Y > 1, got X={X}, Y={Y}")
    u = math.log(X) / math.log(Y)
    if u < 3:
        raise DomainError(f"the bound needs u = log X/log Y >= 3, got u={u:.6g}")
    return math.log(X) + rho_lower_exponent(u, C)


def theorem5_bound(X: float, Y: float, C: float) -> float:
    """X exp{-u(log(u log u) - 1 + (log_2 u - 1)/log u + C (log_2 u/log u)^2)} for u >= 3"""
    return math.exp(theorem5_exponent(X, Y, C))


def ideal_of(ideals: Sequence[PrimeIdealSpec]) -> IdealSpec:
    """Product of prime ideals, repeats collected into exponents"""
    exponents = {}
    for ideal in ideals:
        exponents[ideal] = exponents.get(ideal, 0) + 1
    return IdealSpec(tuple(sorted(exponents.items(), key=lambda item: item[0].sort_key())))
