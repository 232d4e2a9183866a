#!/usr/bin/env python3
"""
Closed-form lower-bound evaluators and the choice of X given Y

Every evaluator returns the exponent together with its exponential; the
exponential is left out once it would overflow a double. Second-order o(1)
terms are dropped: these are main terms only.

Monotonicity in s holds once log s > 1 for thm1, thm2 and thm4 and once
s > exp(n/m - 1) for thm3; all of them decrease strictly in epsilon.
"""

import logging
import math
from fractions import Fraction
from typing import NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from scipy.optimize import bisect

from smoothforge.dickman_xi.xi import rho_lower_exponent
from smoothforge.errors import DomainError

logger = logging.getLogger(__name__)

MAX_EXPONENT = math.log(1.7976931348623157e308)


class BoundValue(BaseModel):
    exponent: float
    value: Optional[float] = None

    @classmethod
    def of(cls, exponent: float) -> "BoundValue":
        value = math.exp(exponent) if exponent < MAX_EXPONENT else None
        return cls(exponent=exponent, value=value)


class BoundQuery(BaseModel):
    """Parameters shared by the theorem bounds"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int = 2
    m: int = 1
    s: float = 3.0
    epsilon: float = 0.5
    c_K: Fraction = Fraction(2)

    @field_validator("c_K", mode="before")
    @classmethod
    def _parse_c_K(cls, value) -> Fraction:
        return value if isinstance(value, Fraction) else Fraction(str(value))

    @model_validator(mode="after")
    def _check_ranges(self) -> "BoundQuery":
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not 1 <= self.m < self.n:
            raise ValueError(f"need 1 <= m < n, got m={self.m}, n={self.n}")
        if self.s < 2:
            raise ValueError(f"s must be at least 2, got {self.s}")
        if not 0 <= self.epsilon <= 1:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not 1 <= self.c_K <= self.n:
            raise ValueError(f"c_K must satisfy 1 <= c_K <= n, got {self.c_K}")
        return self


def _log_s(s: float) -> float:
    if s < math.e:
        raise DomainError(f"the bounds are stated for log s >= 1, got s={s}")
    return math.log(s)


def thm1_bound(q: BoundQuery) -> BoundValue:
    """exp{(1-eps) n^2/(n-1) s^(1-1/n) (log s)^(-1/n)}"""
    log_s = _log_s(q.s)
    n = q.n
    exponent = (1 - q.epsilon) * n * n / (n - 1) * q.s ** (1 - 1 / n) * log_s ** (-1 / n)
    return BoundValue.of(exponent)


def thm2_bound(s: float, epsilon: float) -> BoundValue:
    """exp{(4-eps) s^(1/2) (log s)^(-1/2)}"""
    if not 0 <= epsilon <= 4:
        raise DomainError(f"epsilon must lie in [0, 4], got {epsilon}")
    log_s = _log_s(s)
    return BoundValue.of((4 - epsilon) * math.sqrt(s / log_s))


def thm2_t(s: int, epsilon: float) -> int:
    """t = [((4-eps)/(4-eps/2))^2 s] + 1, the number of smallest primes the lifting uses"""
    if not 0 < epsilon < 4:
        raise DomainError(f"epsilon must lie in (0, 4), got {epsilon}")
    return math.floor(((4 - epsilon) / (4 - epsilon / 2)) ** 2 * s) + 1


def thm3_bound(q: BoundQuery) -> BoundValue:
    """exp{(1-eps)(n/m)(c_K s)^(m/n)(log s)^(m/n - 1)}"""
    log_s = _log_s(q.s)
    power = q.m / q.n
    exponent = (1 - q.epsilon) * (q.n / q.m) * (float(q.c_K) * q.s) ** power * log_s ** (power - 1)
    return BoundValue.of(exponent)


def thm4_bound(q: BoundQuery) -> BoundValue:
    """exp{(1-eps) n (c_K s)^(1/n) (log s)^(1/n - 1)}"""
    log_s = _log_s(q.s)
    power = 1 / q.n
    exponent = (1 - q.epsilon) * q.n * (float(q.c_K) * q.s) ** power * log_s ** (power - 1)
    return BoundValue.of(exponent)


def smoothness_ratio(X: float, Y: float) -> float:
    if X <= 1 or Y <= 1:
        raise DomainError(f"need X > 1 and Y > 1, got X={X}, Y={Y}")
    return math.log(X) / math.log(Y)


def rho_style_bound(X: float, Y: float, C: float) -> BoundValue:
    """X exp{-u(...)} without the u >= 3 check, for tabulating u > 1"""
    u = smoothness_ratio(X, Y)
    if u <= 1:
        raise DomainError(f"the exponent needs u > 1, got u={u:.6g}")
    return BoundValue.of(math.log(X) + rho_lower_exponent(u, C))


def cep_bound(X: float, Y: float, C: float) -> BoundValue:
    """psi(X, Y) >= X exp{-u(log(u log u) - 1 + (log_2 u - 1)/log u + C(log_2 u/log u)^2)}"""
    if Y < 3:
        raise DomainError(f"Y must be at least 3, got {Y}")
    u = smoothness_ratio(X, Y)
    if u < 3:
        raise DomainError(f"the bound needs u = log X/log Y >= 3, got u={u:.6g}")
    return rho_style_bound(X, Y, C)


class Lemma8Choice(NamedTuple):
    X: float
    u: float
    log_X: float
    holds: bool


def lemma8_choose_X(Y: float, alpha: float) -> Lemma8Choice:
    """X = Y^u with u log u = Y^(1-alpha); holds records log X <= 2/(1-alpha) Y^(1-alpha)"""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if Y < 3:
        raise DomainError(f"Y must be at least 3, got {Y}")
    target = Y ** (1 - alpha)
    u = bisect(lambda x: x * math.log(x) - target, 1.0, target + math.e,
               xtol=1e-300, rtol=1e-15, maxiter=2000)
    log_x = u * math.log(Y)
    X = math.exp(log_x) if log_x < MAX_EXPONENT else math.inf
    holds = log_x <= 2 / (1 - alpha) * target
    logger.debug("lemma 8: Y=%g alpha=%g u=%.12g log X=%.6g", Y, alpha, u, log_x)
    return Lemma8Choice(X, u, log_x, holds)


def lemma8_guarantee(Y: float, alpha: float) -> float:
    """Main-term exponent Y^(1-alpha)/((1-alpha) log Y) of psi(X, Y)/X^alpha"""
    if not 0 < alpha < 1 or Y < 3:
        raise DomainError(f"need 0 < alpha < 1 and Y >= 3, got Y={Y}, alpha={alpha}")
    return Y ** (1 - alpha) / ((1 - alpha) * math.log(Y))
