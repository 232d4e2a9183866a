#!/usr/bin/env python3
"""
Dickman-de Bruijn rho on a uniform grid

rho solves u*rho'(u) = -rho(u-1) with rho = 1 on [0, 1]. The table is built
from the equivalent integral identity u*rho(u) = int_{u-1}^{u} rho(t) dt,
marched one grid point at a time with a composite Simpson-type rule over
the values already computed. The grid hits every integer so the delay
term u-1 always lands on a grid point.
"""

import logging
import math
import time
from fractions import Fraction
from typing import Union

import numpy as np
from scipy.integrate import cumulative_trapezoid

from smoothforge.errors import DomainError, OutOfRangeError

logger = logging.getLogger(__name__)

StepLike = Union[Fraction, str, int, float]

MAX_STEP = Fraction(1, 64)


def composite_weights(panels: int, h: float) -> np.ndarray:
    """Weights of a composite Simpson rule over `panels` equal panels

    Odd panel counts close with Simpson's 3/8 rule on the last three panels.
    """
    weights = np.zeros(panels + 1)
    simpson_panels = panels if panels % 2 == 0 else panels - 3
    if simpson_panels > 0:
        weights[0:simpson_panels + 1:2] += 2.0
        weights[1:simpson_panels:2] += 4.0
        weights[0] -= 1.0
        weights[simpson_panels] -= 1.0
        weights[:simpson_panels + 1] *= h / 3.0
    if simpson_panels != panels:
        weights[simpson_panels:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return weights


class RhoTable:
    """Immutable grid of rho values at u = 0, step, 2*step, ..."""

    def __init__(self, step: Fraction, values: np.ndarray):
        self.step = Fraction(step)
        self.per_unit = self.step.denominator
        self.values = np.asarray(values, dtype=np.float64)
        self.values.setflags(write=False)
        self.u_max = float((len(self.values) - 1) * self.step)
        self._grid = np.arange(len(self.values), dtype=np.float64) / self.per_unit
        self._grid.setflags(write=False)
        self._cumulative = cumulative_trapezoid(self.values, self._grid, initial=0.0)
        self._weights = composite_weights(self.per_unit, float(self.step))

    @property
    def grid(self) -> np.ndarray:
        """Grid abscissae"""
        return self._grid

    def __len__(self) -> int:
        return len(self.values)

    def index_of(self, u: float) -> int:
        """Grid index of a grid point u"""
        k = int(round(u * self.per_unit))
        if abs(k - u * self.per_unit) > 1e-9 or not 0 <= k < len(self.values):
            raise DomainError(f"u={u} is not a grid point of the table")
        return k

    def __call__(self, u: float) -> float:
        if u < 0:
            return 0.0
        if u <= 1:
            return 1.0
        if u > self.u_max:
            raise OutOfRangeError("u", u, self.u_max)
        return float(np.interp(u, self._grid, self.values))

    def evaluate(self, u: np.ndarray) -> np.ndarray:
        """Vectorised rho with the same conventions as calling the table"""
        u = np.asarray(u, dtype=np.float64)
        if np.any(u > self.u_max):
            raise OutOfRangeError("u", float(np.max(u)), self.u_max)
        out = np.interp(u, self._grid, self.values)
        out = np.where(u <= 1.0, 1.0, out)
        return np.where(u < 0.0, 0.0, out)

    def _antiderivative(self, x: float) -> float:
        """Exact integral of the interpolant from 0 to x"""
        if x <= 0:
            return 0.0
        if x > self.u_max:
            raise OutOfRangeError("u", x, self.u_max)
        k = min(int(x * self.per_unit), len(self.values) - 1)
        left = self._grid[k]
        return float(self._cumulative[k] + (x - left) * (self.values[k] + self(x)) / 2.0)

    def integral(self, a: float, b: float) -> float:
        """int_a^b rho(t) dt over the interpolated table"""
        if a > b:
            return -self.integral(b, a)
        return self._antiderivative(b) - self._antiderivative(a)


def _as_step(step: StepLike) -> Fraction:
    try:
        frac = Fraction(str(step)) if isinstance(step, str) else Fraction(step)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"step {step!r} is not a rational number") from exc
    if not 0 < frac <= MAX_STEP:
        raise DomainError(f"step must satisfy 0 < step <= {MAX_STEP}, got {frac}")
    if frac.numerator != 1:
        raise DomainError(f"step {frac} does not divide 1 evenly; use 1/N")
    return frac


def build_rho_table(step: StepLike = Fraction(1, 1024), u_max: float = 64.0) -> RhoTable:
    """March the integral identity out to u_max"""

    frac = _as_step(step)
    if not u_max >= 2:
        raise DomainError(f"u_max must be at least 2, got {u_max}")

    started = time.perf_counter()
    per_unit = frac.denominator
    h = float(frac)
    last = math.ceil(u_max * per_unit)
    u = np.arange(last + 1, dtype=np.float64) / per_unit

    values = np.empty(last + 1)
    values[:per_unit + 1] = 1.0
    # on [1, 2] the delay term is the plateau, so the identity integrates in closed form
    values[per_unit:2 * per_unit + 1] = 1.0 - np.log(u[per_unit:2 * per_unit + 1])

    weights = composite_weights(per_unit, h)
    head, tail = weights[:-1], weights[-1]
    for k in range(2 * per_unit + 1, last + 1):
        window = values[k - per_unit:k]
        values[k] = float(head @ window) / (u[k] - tail)

    table = RhoTable(frac, values)
    logger.info("built rho table step=%s u_max=%.6g points=%d in %.2fs",
                frac, table.u_max, len(table), time.perf_counter() - started)
    return table


def rho(table: RhoTable, u: float) -> float:
    """Interpolated rho(u); 0 below zero, exactly 1 on [0, 1]"""
    return table(u)


def rho_integral(table: RhoTable, a: float, b: float) -> float:
    """int_a^b rho over the table"""
    return table.integral(a, b)


def identity_residual(table: RhoTable, u: float) -> float:
    """|u*rho(u) - int_{u-1}^{u} rho| at a grid point u >= 1, integral by the composite rule"""
    if u < 1:
        raise DomainError(f"the integral identity holds for u >= 1, got {u}")
    k = table.index_of(u)
    window = table.values[k - table.per_unit:k + 1]
    return abs(u * table.values[k] - float(table._weights @ window))
