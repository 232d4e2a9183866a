#!/usr/bin/env python3
"""
Rational primes ordered by the smallest norm p^k_p of a prime ideal above them
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, NamedTuple, Tuple

from sympy import primerange

from smoothforge.errors import DomainError
from smoothforge.quad_ideals.fields import Field, QuadField, SplitType

logger = logging.getLogger(__name__)


class OrderedPrime(NamedTuple):
    p: int
    k: int
    norm: int


@dataclass(frozen=True)
class OrderedPrimeList:
    entries: Tuple[OrderedPrime, ...]

    @property
    def primes(self) -> List[int]:
        return [entry.p for entry in self.entries]

    @property
    def norms(self) -> List[int]:
        return [entry.norm for entry in self.entries]

    @property
    def Y(self) -> int:
        """Norm of the last entry"""
        return self.entries[-1].norm


def smallest_norm(field: Field, p: int) -> OrderedPrime:
    ideals = field.splitting(p)
    k = 2 if ideals[0].split_type is SplitType.INERT else 1
    return OrderedPrime(p, k, p ** k)


def order_primes(field: Field, s: int) -> OrderedPrimeList:
    """The first s primes sorted by p^k_p, ties by p"""
    if s < 1:
        raise DomainError(f"s must be at least 1, got {s}")
    bound = max(16, int(3 * s * math.log(s + 1)))
    while True:
        entries = [smallest_norm(field, int(p)) for p in primerange(2, bound + 1)]
        # complete below the bound: an inert p with p^2 > bound may still be outranked
        complete = sorted((entry for entry in entries if entry.norm <= bound),
                          key=lambda entry: (entry.norm, entry.p))
        if len(complete) >= s:
            logger.debug("ordered %d primes of %s below %d", s, field.name, bound)
            return OrderedPrimeList(tuple(complete[:s]))
        bound *= 2


def chebotarev_constant(field: Field) -> Fraction:
    """c_K = n for normal K; every quadratic field is normal"""
    return Fraction(2) if isinstance(field, QuadField) else Fraction(1)
