#!/usr/bin/env python3
"""
The saddle function xi(u), its integrals and the rho sandwich bounds

xi(u) is the positive root of (e^xi - 1)/xi = u for u > 1. It extends
continuously by xi(1) = 0, which is how integrals starting at 1 are taken.
"""

import logging
import math
import threading
from typing import Dict, NamedTuple, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, newton

from smoothforge.dickman_xi.rho_table import RhoTable
from smoothforge.errors import DomainError

logger = logging.getLogger(__name__)

GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(5)

SERIES_CUTOFF = 1e-3


def _mean_exp(x):
    """(e^x - 1)/x, equal to 1 at x = 0"""
    x = np.asarray(x, dtype=np.float64)
    safe = np.where(x == 0.0, 1.0, x)
    return np.where(x == 0.0, 1.0, np.expm1(safe) / safe)


def _mean_exp_slope(x):
    """Derivative of (e^x - 1)/x; Taylor series near zero avoids cancellation"""
    x = np.asarray(x, dtype=np.float64)
    series = 0.5 + x / 3.0 + x * x / 8.0 + x ** 3 / 30.0
    safe = np.where(np.abs(x) < SERIES_CUTOFF, 1.0, x)
    direct = (safe * np.exp(safe) - np.expm1(safe)) / (safe * safe)
    return np.where(np.abs(x) < SERIES_CUTOFF, series, direct)


def initial_guess(u):
    """Starting point log(u*log(u) + 2) for the Newton iteration"""
    u = np.asarray(u, dtype=np.float64)
    return np.log(u * np.log(u) + 2.0)


class XiEvaluator:
    """Root finder for xi(u) with a thread-safe cache of solved values"""

    def __init__(self, tolerance: float = 1e-12):
        if not tolerance > 0:
            raise DomainError("tolerance must be positive")
        self.tolerance = tolerance
        self.cache: Dict[float, float] = {}
        self._lock = threading.Lock()

    def residual(self, u: float, value: float) -> float:
        """|(e^xi - 1)/xi - u|"""
        return abs(float(_mean_exp(value)) - u)

    def _bracket(self, u: float) -> Tuple[float, float]:
        low = 1e-300
        high = max(1.0, 2.0 * math.log(u) + 2.0)
        while float(_mean_exp(high)) < u:
            high *= 2.0
        return low, high

    def solve(self, u: float) -> float:
        """Solve for xi(u) without touching the cache"""
        if not math.isfinite(u):
            raise DomainError(f"xi needs a finite argument, got {u}")
        if u <= 1:
            raise DomainError(f"xi(u) is defined only for u > 1, got {u}")

        low, high = self._bracket(u)
        func = lambda x: float(_mean_exp(x)) - u
        slope = lambda x: float(_mean_exp_slope(x))
        try:
            value = newton(func, float(initial_guess(u)), fprime=slope,
                           tol=1e-15, rtol=1e-15, maxiter=100)
        except (RuntimeError, ZeroDivisionError, OverflowError):
            value = math.nan

        if not (low < value < high) or self.residual(u, value) > self.tolerance * u:
            logger.debug("newton left the bracket for u=%r, falling back to brentq", u)
            value = brentq(func, low, high, xtol=1e-300, rtol=1e-15, maxiter=500)
        return value

    def xi(self, u: float) -> float:
        """Cached xi(u)"""
        cached = self.cache.get(u)
        if cached is not None:
            return cached
        value = self.solve(u)
        with self._lock:
            self.cache[u] = value
        return value

    def many(self, u_values: np.ndarray) -> np.ndarray:
        """Vectorised xi; entries u <= 1 map to the continuous extension 0"""
        u = np.asarray(u_values, dtype=np.float64)
        out = np.zeros_like(u)
        active = u > 1.0
        if not np.any(active):
            return out
        targets = u[active]
        result = newton(lambda x, t: _mean_exp(x) - t, initial_guess(targets),
                        fprime=lambda x, t: _mean_exp_slope(x), args=(targets,),
                        tol=1e-15, rtol=1e-15, maxiter=100, full_output=True, disp=False)
        roots = np.asarray(result.root, dtype=np.float64)
        bad = (~np.asarray(result.converged)) | ~np.isfinite(roots) | (roots <= 0)
        bad |= np.abs(_mean_exp(np.where(roots > 0, roots, 1.0)) - targets) > self.tolerance * targets
        for idx in np.flatnonzero(bad):
            roots[idx] = self.solve(float(targets[idx]))
        out[active] = roots
        return out


def xi(ev: XiEvaluator, u: float) -> float:
    """xi(u) for u > 1"""
    return ev.xi(u)


def xi_array(ev: XiEvaluator, u_values: np.ndarray) -> np.ndarray:
    """xi over an array of arguments"""
    return ev.many(u_values)


def xi_integral(ev: XiEvaluator, a: float, b: float) -> float:
    """Adaptive quadrature of xi over [a, b], with xi(1) = 0 at the lower end"""
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"endpoints must be finite, got ({a}, {b})")
    if a < 1 or a > b:
        raise DomainError(f"need 1 <= a <= b, got ({a}, {b})")
    if a == b:
        return 0.0
    integrand = lambda t: ev.solve(t) if t > 1.0 else 0.0
    value, error = quad(integrand, a, b, epsabs=1e-11, epsrel=1e-11, limit=200)
    logger.debug("xi integral over [%g, %g] = %.15g (error estimate %.2g)", a, b, value, error)
    return value


def xi_cumulative(ev: XiEvaluator, grid: np.ndarray) -> np.ndarray:
    """Running integral of xi from grid[0] to each grid point"""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or len(grid) == 0 or grid[0] < 1 or np.any(np.diff(grid) < 0):
        raise DomainError("grid must be a non-empty ascending array starting at u >= 1")
    half = np.diff(grid) / 2.0
    mid = (grid[1:] + grid[:-1]) / 2.0
    nodes = mid[:, None] + half[:, None] * GAUSS_NODES[None, :]
    values = ev.many(nodes.ravel()).reshape(nodes.shape)
    pieces = (values * GAUSS_WEIGHTS[None, :]).sum(axis=1) * half
    return np.concatenate(([0.0], np.cumsum(pieces)))


def rho_bounds_lemma2(ev: XiEvaluator, u: float) -> Tuple[float, float]:
    """exp(-int_2^{u+1} xi) <= rho(u) <= exp(-int_1^u xi) for u >= 1"""
    if u < 1:
        raise DomainError(f"the sandwich holds for u >= 1, got {u}")
    lower = math.exp(-xi_integral(ev, 2.0, u + 1.0))
    upper = math.exp(-xi_integral(ev, 1.0, u))
    return lower, upper


class SandwichProfile(NamedTuple):
    u: np.ndarray
    lower: np.ndarray
    rho: np.ndarray
    upper: np.ndarray


def lemma2_profile(ev: XiEvaluator, table: RhoTable, u_max: float = 30.0) -> SandwichProfile:
    """Both sandwich bounds at every grid point of [1, u_max]"""
    if u_max < 1 or u_max > table.u_max:
        raise DomainError(f"u_max must lie in [1, {table.u_max}], got {u_max}")
    per_unit = table.per_unit
    last = int(math.floor(u_max * per_unit + 1e-9))
    grid = np.arange(per_unit, last + per_unit + 1, dtype=np.float64) / per_unit
    running = xi_cumulative(ev, grid)

    count = last - per_unit + 1
    upper = np.exp(-running[:count])
    lower = np.exp(-(running[per_unit:per_unit + count] - running[per_unit]))
    return SandwichProfile(grid[:count], lower, table.values[per_unit:last + 1].copy(), upper)


def xi_asymptotic(u: float, rounds: int) -> float:
    """Bootstrap xi = log u + log xi; rounds=1 is log u itself"""
    if u < 3:
        raise DomainError(f"the expansion is used for u >= 3, got {u}")
    if rounds < 1:
        raise DomainError(f"rounds must be at least 1, got {rounds}")
    log_u = math.log(u)
    value = log_u
    for _ in range(rounds - 1):
        value = log_u + math.log(value)
    return value


def rho_lower_exponent(u: float, C: float = 0.0) -> float:
    """-u*{log(u log u) - 1 + (log_2 u - 1)/log u + C*(log_2 u/log u)^2} for u > 1"""
    if u <= 1:
        raise DomainError(f"the exponent needs log log u, so u > 1; got {u}")
    log_u = math.log(u)
    log2_u = math.log(log_u)
    return -u * (math.log(u * log_u) - 1.0 + (log2_u - 1.0) / log_u
                 + C * (log2_u / log_u) ** 2)


def rho_lower_explicit(u: float) -> float:
    """Main term of the explicit rho lower bound; a reference curve, not certified"""
    if u < 3:
        raise DomainError(f"the explicit lower bound is stated for u >= 3, got {u}")
    return math.exp(rho_lower_exponent(u))
