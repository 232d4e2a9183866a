#!/usr/bin/env python3
"""
Smallest-prime-factor sieve and exact counts of Y-smooth integers
"""

import logging
import math
import time
from functools import cached_property
from typing import Dict, Iterable

import numpy as np
from pydantic import BaseModel

from smoothforge.dickman_xi.rho_table import RhoTable
from smoothforge.errors import CapExceededError, DomainError, OutOfRangeError

logger = logging.getLogger(__name__)

DEFAULT_SIEVE_CAP = 10_000_000
DEFAULT_ENUMERATION_CAP = 10_000_000


class PsiResult(BaseModel):
    X: float
    Y: float
    count: int
    u: float


def smoothness_exponent(X: float, Y: float) -> float:
    """u = log X / log Y"""
    if X <= 1:
        return 0.0
    if Y <= 1:
        return math.inf
    return math.log(X) / math.log(Y)


def spf_table(limit: int) -> np.ndarray:
    """Eratosthenes over multiples of each prime, first writer wins"""
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p]:
            continue
        multiples = spf[p * p::p]
        multiples[multiples == 0] = p
    untouched = np.flatnonzero(spf == 0)
    spf[untouched] = untouched
    return spf


class SmoothSieve:
    """Immutable smallest-prime-factor table covering 1..limit"""

    def __init__(self, limit: int, spf: np.ndarray):
        self.limit = limit
        self.spf = np.asarray(spf, dtype=np.int32)
        self.spf.setflags(write=False)

    @cached_property
    def gpf(self) -> np.ndarray:
        """Largest prime factor of every n <= limit (gpf[1] = 1)"""
        started = time.perf_counter()
        gpf = np.ones(self.limit + 1, dtype=np.int32)
        gpf[0] = 0
        rest = np.arange(self.limit + 1, dtype=np.int32)
        active = np.flatnonzero(rest > 1)
        while len(active):
            p = self.spf[rest[active]]
            gpf[active] = np.maximum(gpf[active], p)
            rest[active] //= p
            active = active[rest[active] > 1]
        gpf.setflags(write=False)
        logger.debug("largest-prime-factor table for %d in %.2fs", self.limit,
                     time.perf_counter() - started)
        return gpf

    def check(self, n: int) -> None:
        if n < 1:
            raise DomainError(f"expected a positive integer, got {n}")
        if n > self.limit:
            raise OutOfRangeError("n", n, self.limit)


def build_sieve(limit: int, cap: int = DEFAULT_SIEVE_CAP) -> SmoothSieve:
    """Complete smallest-prime-factor table up to limit"""
    if limit < 2:
        raise DomainError(f"sieve limit must be at least 2, got {limit}")
    if limit > cap:
        raise CapExceededError("sieve_limit", limit, cap, "smallest-prime-factor table")
    started = time.perf_counter()
    sieve = SmoothSieve(limit, spf_table(limit))
    logger.info("sieved spf up to %d in %.2fs", limit, time.perf_counter() - started)
    return sieve


def factor(sieve: SmoothSieve, n: int) -> Dict[int, int]:
    """Prime factorisation by repeated smallest-prime-factor division"""
    sieve.check(n)
    exponents: Dict[int, int] = {}
    while n > 1:
        p = int(sieve.spf[n])
        exponents[p] = exponents.get(p, 0) + 1
        n //= p
    return exponents


def largest_prime_factor(sieve: SmoothSieve, n: int) -> int:
    """P(n); P(1) = 1"""
    sieve.check(n)
    largest = 1
    while n > 1:
        p = int(sieve.spf[n])
        largest = max(largest, p)
        n //= p
    return largest


def _bounds(sieve: SmoothSieve, X: float, Y: float) -> int:
    if Y < 1:
        raise DomainError(f"Y must be at least 1, got {Y}")
    if X > sieve.limit:
        raise OutOfRangeError("X", X, sieve.limit)
    return int(math.floor(X))


def psi(sieve: SmoothSieve, X: float, Y: float) -> PsiResult:
    """Exact count of n <= X with P(n) <= Y"""
    top = _bounds(sieve, X, Y)
    count = int(np.count_nonzero(sieve.gpf[1:top + 1] <= Y)) if top >= 1 else 0
    return PsiResult(X=X, Y=Y, count=count, u=smoothness_exponent(X, Y))


def psi_enumerate(sieve: SmoothSieve, X: float, Y: float,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Ascending array of all Y-smooth n <= X"""
    top = _bounds(sieve, X, Y)
    if top < 1:
        return np.zeros(0, dtype=np.int64)
    mask = sieve.gpf[1:top + 1] <= Y
    count = int(np.count_nonzero(mask))
    if count > cap:
        raise CapExceededError("enumeration_cap", count, cap, f"psi({X:g}, {Y:g})")
    return np.flatnonzero(mask).astype(np.int64) + 1


def supported_on(sieve: SmoothSieve, values: Iterable[int], primes: Iterable[int]) -> np.ndarray:
    """Mask of values >= 1 whose prime factors all lie in primes"""
    values = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.int64)
    if values.size and int(values.max()) > sieve.limit:
        raise CapExceededError("sieve_limit", int(values.max()), sieve.limit, "value to factor")
    allowed = np.asarray(sorted(set(int(p) for p in primes)), dtype=np.int64)

    ok = values >= 1
    rest = np.where(ok, values, 1)
    active = np.flatnonzero(rest > 1)
    while len(active):
        p = sieve.spf[rest[active]].astype(np.int64)
        foreign = ~np.isin(p, allowed)
        ok[active[foreign]] = False
        rest[active[foreign]] = 1
        keep = active[~foreign]
        rest[keep] //= p[~foreign]
        active = keep[rest[keep] > 1]
    return ok


def hildebrand_estimate(table: RhoTable, X: float, Y: float) -> float:
    """Main term X*rho(u) of psi(X, Y)"""
    if Y < 2:
        raise DomainError(f"Y must be at least 2, got {Y}")
    return X * table(smoothness_exponent(X, Y))
