#!/usr/bin/env python3
"""
Quadratic fields Q(sqrt d), their prime ideals and excluded prime sets

Prime ideals are described by their splitting data only: the rational prime
below, the splitting type, the norm and an index telling apart the two
ideals above a split prime. The rationals are carried along as a degree-one
field so every ideal count also runs on the rational specialization.
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from functools import lru_cache
from typing import FrozenSet, Iterable, Iterator, List, Tuple, Union

from sympy import factorint, isprime, legendre_symbol, primerange

from smoothforge.errors import DomainError

logger = logging.getLogger(__name__)

# imaginary quadratic fields of class number one
HEEGNER_D = frozenset({-1, -2, -3, -7, -11, -19, -43, -67, -163})

# real quadratic fields of class number one, d < 100
REAL_CLASS_NUMBER_ONE_D = frozenset({
    2, 3, 5, 6, 7, 11, 13, 14, 17, 19, 21, 22, 23, 29, 31, 33, 37, 38, 41,
    43, 46, 47, 53, 57, 59, 61, 62, 67, 69, 71, 73, 77, 83, 86, 89, 93, 94, 97,
})


class SplitType(Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"
    RATIONAL = "rational"


@dataclass(frozen=True)
class PrimeIdealSpec:
    """A prime ideal above the rational prime p"""

    p: int
    split_type: SplitType
    norm: int
    index: int = 1

    @property
    def label(self) -> str:
        return f"{self.p}:{self.index}"

    def sort_key(self) -> Tuple[int, int, int]:
        return (self.norm, self.p, self.index)


def kronecker_at_prime(D: int, p: int) -> int:
    """Kronecker symbol (D/p) for a prime p"""
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 in (1, 7) else -1
    return int(legendre_symbol(D % p, p)) if D % p else 0


@dataclass(frozen=True)
class RationalField:
    """Q as a degree-one field: one prime ideal of norm p above every p"""

    d: int = 1
    degree: int = 1
    discriminant: int = 1
    class_number_one: bool = True

    @property
    def name(self) -> str:
        return "Q"

    def splitting(self, p: int) -> List[PrimeIdealSpec]:
        return [PrimeIdealSpec(p, SplitType.RATIONAL, p, 1)]


@dataclass(frozen=True)
class QuadField:
    """Q(sqrt d) for a squarefree d not in {0, 1}"""

    d: int
    degree: int = dataclass_field(default=2, init=False)
    discriminant: int = dataclass_field(init=False)
    class_number_one: bool = dataclass_field(init=False)

    def __post_init__(self):
        if self.d in (0, 1):
            raise DomainError(f"d must be a squarefree integer other than 0 and 1, got {self.d}")
        if any(exp > 1 for exp in factorint(abs(self.d)).values()):
            raise DomainError(f"d={self.d} is not squarefree")
        disc = self.d if self.d % 4 == 1 else 4 * self.d
        object.__setattr__(self, "discriminant", disc)
        object.__setattr__(self, "class_number_one",
                           self.d in HEEGNER_D or self.d in REAL_CLASS_NUMBER_ONE_D)

    @property
    def name(self) -> str:
        return "Q(i)" if self.d == -1 else f"Q(sqrt({self.d}))"

    def splitting(self, p: int) -> List[PrimeIdealSpec]:
        symbol = kronecker_at_prime(self.discriminant, p)
        if symbol == 1:
            return [PrimeIdealSpec(p, SplitType.SPLIT, p, 1),
                    PrimeIdealSpec(p, SplitType.SPLIT, p, 2)]
        if symbol == -1:
            return [PrimeIdealSpec(p, SplitType.INERT, p * p, 1)]
        return [PrimeIdealSpec(p, SplitType.RAMIFIED, p, 1)]


Field = Union[QuadField, RationalField]


def field_for(d: int) -> Field:
    """d = 1 selects the rationals, anything else Q(sqrt d)"""
    return RationalField() if d == 1 else QuadField(d)


def splitting(field: Field, p: int) -> List[PrimeIdealSpec]:
    """Prime ideals above p"""
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    return field.splitting(p)


@dataclass(frozen=True)
class ExcludedSet:
    """The finite set T of prime ideals left out of every count"""

    members: FrozenSet[PrimeIdealSpec] = frozenset()

    def __contains__(self, ideal: PrimeIdealSpec) -> bool:
        return ideal in self.members

    def __iter__(self) -> Iterator[PrimeIdealSpec]:
        return iter(sorted(self.members, key=PrimeIdealSpec.sort_key))

    def __len__(self) -> int:
        return len(self.members)

    @property
    def labels(self) -> List[str]:
        return [ideal.label for ideal in self]

    @classmethod
    def of(cls, ideals: Iterable[PrimeIdealSpec]) -> "ExcludedSet":
        return cls(frozenset(ideals))

    @classmethod
    def from_labels(cls, field: Field, labels: Iterable[str]) -> "ExcludedSet":
        """Parse p:index labels, e.g. '2:1' for the ideal above 2"""
        members = set()
        for label in labels:
            label = label.strip()
            if not label:
                continue
            p_text, _, index_text = label.partition(":")
            try:
                p, index = int(p_text), int(index_text or 1)
            except ValueError as exc:
                raise DomainError(f"bad prime ideal label {label!r}, expected p:index") from exc
            matches = [ideal for ideal in splitting(field, p) if ideal.index == index]
            if not matches:
                raise DomainError(f"no prime ideal {label} in {field.name}")
            members.add(matches[0])
        return cls(frozenset(members))


EMPTY = ExcludedSet()


@dataclass(frozen=True)
class IdealSpec:
    """An ideal given by its prime-ideal factorisation"""

    factorization: Tuple[Tuple[PrimeIdealSpec, int], ...] = ()

    def __post_init__(self):
        for ideal, exponent in self.factorization:
            if exponent < 1:
                raise DomainError(f"exponent of {ideal.label} must be positive, got {exponent}")
        if len({ideal for ideal, _ in self.factorization}) != len(self.factorization):
            raise DomainError("repeated prime ideal in factorisation")

    @property
    def norm(self) -> int:
        value = 1
        for ideal, exponent in self.factorization:
            value *= ideal.norm ** exponent
        return value

    @property
    def largest_norm(self) -> int:
        """P(a); 1 for the unit ideal"""
        return max((ideal.norm for ideal, _ in self.factorization), default=1)

    @classmethod
    def power(cls, ideal: PrimeIdealSpec, exponent: int) -> "IdealSpec":
        return cls(((ideal, exponent),))


@lru_cache(maxsize=64)
def _all_prime_ideals(field: Field, bound: int) -> Tuple[PrimeIdealSpec, ...]:
    ideals = [ideal for p in primerange(2, bound + 1)
              for ideal in field.splitting(int(p)) if ideal.norm <= bound]
    ideals.sort(key=PrimeIdealSpec.sort_key)
    logger.debug("%d prime ideals of norm <= %d in %s", len(ideals), bound, field.name)
    return tuple(ideals)


def prime_ideals_up_to(field: Field, Y: float, T: ExcludedSet = EMPTY) -> List[PrimeIdealSpec]:
    """Prime ideals of norm <= Y outside T, sorted by norm, then p, then index"""
    bound = int(Y) if Y >= 1 else 0
    if bound < 2:
        return []
    return [ideal for ideal in _all_prime_ideals(field, bound) if ideal not in T]
