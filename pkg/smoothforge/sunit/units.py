#!/usr/bin/env python3
"""
S-units, solutions of a_1 x_1 + ... + a_n x_n = 1 and the lifting of
two-variable solutions to n variables

An S-unit is a nonzero rational whose numerator and denominator in lowest
terms factor over S. Both signs are admitted.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from sympy import isprime, multiplicity, primefactors, primerange, sieve as prime_sieve

from smoothforge.bounds.evaluators import thm2_t
from smoothforge.errors import CapExceededError, ConstructionError, DomainError

logger = logging.getLogger(__name__)

DEFAULT_WORK_CAP = 10_000_000
MAX_SUBSET_TERMS = 20


@dataclass(frozen=True)
class SUnitInstance:
    """Coefficients a and the prime set S"""

    a: Tuple[Fraction, ...]
    S: Tuple[int, ...]

    def __post_init__(self):
        a = tuple(Fraction(value) for value in self.a)
        if len(a) < 1 or any(value == 0 for value in a):
            raise DomainError("coefficients must be nonzero")
        primes = tuple(sorted(set(int(p) for p in self.S)))
        if len(primes) != len(self.S):
            raise DomainError(f"repeated primes in S: {self.S}")
        for p in primes:
            if not isprime(p):
                raise DomainError(f"{p} in S is not prime")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "S", primes)

    @property
    def n(self) -> int:
        return len(self.a)


@dataclass(frozen=True, order=True)
class Solution:
    x: Tuple[Fraction, ...]

    def value(self, a: Sequence[Fraction]) -> Fraction:
        return sum((coef * xi for coef, xi in zip(a, self.x)), Fraction(0))


def _strip(n: int, S: Iterable[int]) -> int:
    for p in S:
        while n % p == 0:
            n //= p
    return n


def is_s_unit(q: Fraction, S: Iterable[int]) -> bool:
    """Numerator and denominator of q factor over S; the sign is ignored"""
    q = Fraction(q)
    if q == 0:
        raise DomainError("0 is not an S-unit")
    primes = list(S)
    return _strip(abs(q.numerator), primes) == 1 and _strip(q.denominator, primes) == 1


def s_unit_exponents(q: Fraction, S: Iterable[int]) -> Dict[int, int]:
    """Signed exponent of every p in S in the S-unit q"""
    q = Fraction(q)
    primes = sorted(set(S))
    if not is_s_unit(q, primes):
        raise DomainError(f"{q} is not an S-unit for S={primes}")
    return {p: multiplicity(p, abs(q.numerator)) - multiplicity(p, q.denominator) for p in primes}


def s_units_in_box(S: Sequence[int], exponent_bound: int) -> List[Fraction]:
    """+-prod p^e over |e| <= exponent_bound"""
    magnitudes = [Fraction(1)]
    for p in S:
        powers = [Fraction(p) ** e for e in range(-exponent_bound, exponent_bound + 1)]
        magnitudes = [value * power for value in magnitudes for power in powers]
    return sorted(magnitudes + [-value for value in magnitudes])


def verify_solution(inst: SUnitInstance, sol: Solution) -> bool:
    """Exact substitution plus S-unit membership of every coordinate"""
    if len(sol.x) != inst.n or any(xi == 0 for xi in sol.x):
        return False
    return sol.value(inst.a) == 1 and all(is_s_unit(xi, inst.S) for xi in sol.x)


def enumerate_solutions(inst: SUnitInstance, exponent_bound: int,
                        cap: int = DEFAULT_WORK_CAP) -> List[Solution]:
    """Solutions whose first n-1 coordinates lie in the S-unit box, the last one solved for"""
    if exponent_bound < 0:
        raise DomainError(f"exponent bound must be non-negative, got {exponent_bound}")
    box = s_units_in_box(inst.S, exponent_bound)
    work = len(box) ** (inst.n - 1)
    if work > cap:
        raise CapExceededError("enumeration_cap", work, cap, "S-unit tuples to try")

    *head, last = inst.a
    found = set()
    for prefix in itertools.product(box, repeat=inst.n - 1):
        rest = 1 - sum((coef * xi for coef, xi in zip(head, prefix)), Fraction(0))
        if rest == 0:
            continue
        x_last = rest / last
        if is_s_unit(x_last, inst.S):
            found.add(Solution(tuple(prefix) + (x_last,)))
    logger.debug("%d solutions from %d prefixes", len(found), work)
    return sorted(found)


def check_nondegenerate(inst: SUnitInstance, sol: Solution) -> bool:
    """No non-empty proper subset of the terms a_i x_i sums to zero"""
    n = inst.n
    if n > MAX_SUBSET_TERMS:
        raise CapExceededError("subset_terms", n, MAX_SUBSET_TERMS, "2^n - 2 subset sums")
    terms = [coef * xi for coef, xi in zip(inst.a, sol.x)]
    for size in range(1, n):
        for subset in itertools.combinations(terms, size):
            if sum(subset, Fraction(0)) == 0:
                return False
    return True


def _check_all_ones(solutions: Iterable[Sequence[Fraction]], what: str) -> List[Tuple[Fraction, ...]]:
    checked = []
    for coords in solutions:
        coords = tuple(Fraction(value) for value in coords)
        if sum(coords, Fraction(0)) != 1:
            raise DomainError(f"{what} entry {coords} does not sum to 1")
        checked.append(coords)
    return checked


def lift_solutions(U: Iterable[Sequence[Fraction]], Z: Iterable[Sequence[Fraction]]) -> List[Solution]:
    """(y_1, ..., y_{n-2}, y_{n-1} z_1, y_{n-1} z_2) for every y in U and z in Z"""
    ys = _check_all_ones(U, "U")
    zs = _check_all_ones(Z, "Z")
    for z in zs:
        if len(z) != 2:
            raise DomainError(f"Z holds two-variable solutions, got {z}")
    lifted = {}
    for y in ys:
        for z1, z2 in zs:
            coords = y[:-1] + (y[-1] * z1, y[-1] * z2)
            lifted.setdefault(coords, Solution(coords))
    return list(lifted.values())


def lift_tower(Z: Iterable[Sequence[Fraction]], n: int) -> List[Solution]:
    """n-variable all-ones solutions from repeated lifting of the two-variable set Z"""
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    zs = _check_all_ones(Z, "Z")
    current = [Solution(z) for z in zs]
    for _ in range(n - 2):
        current = lift_solutions([sol.x for sol in current], zs)
    return current


def rescale_solutions(a: Sequence[Fraction], solutions: Iterable[Solution]) -> List[Solution]:
    """x_i = y_i/a_i turns solutions of sum y_i = 1 into solutions of sum a_i x_i = 1"""
    a = [Fraction(value) for value in a]
    if any(value == 0 for value in a):
        raise DomainError("coefficients must be nonzero")
    out = []
    for sol in solutions:
        if len(sol.x) != len(a):
            raise DomainError(f"solution of length {len(sol.x)} for {len(a)} coefficients")
        out.append(Solution(tuple(y / coef for y, coef in zip(sol.x, a))))
    return out


def first_primes(count: int) -> List[int]:
    """The first count primes"""
    if count <= 0:
        return []
    prime_sieve.extend_to_no(count)
    return [int(p) for p in prime_sieve[1:count + 1]]


def coefficient_primes(a: Iterable[Fraction]) -> List[int]:
    """Primes dividing a numerator or denominator of some coefficient"""
    primes = set()
    for value in a:
        value = Fraction(value)
        primes.update(primefactors(abs(value.numerator)))
        primes.update(primefactors(value.denominator))
    return sorted(int(p) for p in primes)


def pad_primes(required: Iterable[int], size: int, above: int) -> List[int]:
    """required plus the smallest primes greater than `above` until there are `size`"""
    chosen = set(required)
    if len(chosen) > size:
        raise ConstructionError(f"{len(chosen)} required primes do not fit in a set of size {size}")
    start = above + 1
    while len(chosen) < size:
        for p in primerange(start, 2 * start + 2):
            if len(chosen) == size:
                break
            chosen.add(int(p))
        start = 2 * start + 2
    return sorted(chosen)


class PrimeSetChoice(NamedTuple):
    t: int
    T: List[int]
    R: List[int]
    S: List[int]


def theorem2_prime_set(a: Sequence[Fraction], s: int, epsilon: float,
                       T: Optional[Sequence[int]] = None) -> PrimeSetChoice:
    """t primes T (the first t unless given), R from the coefficients, S their union padded to s"""
    t = thm2_t(s, epsilon)
    if T is None:
        T = first_primes(t)
    else:
        T = sorted(set(int(p) for p in T))
        if len(T) != t:
            raise DomainError(f"T must hold t = {t} primes, got {len(T)}")
    R = coefficient_primes(a)
    union = set(T) | set(R)
    if len(union) > s:
        raise ConstructionError(f"|T u R| = {len(union)} exceeds s = {s}; take s larger")
    return PrimeSetChoice(t, T, R, pad_primes(union, s, T[-1] if T else 1))
