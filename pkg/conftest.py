#!/usr/bin/env python3
"""
Shared fixtures: one rho table, one sieve and one xi evaluator per session
"""

from fractions import Fraction

import pytest

from smoothforge.dickman_xi.rho_table import build_rho_table
from smoothforge.dickman_xi.xi import XiEvaluator
from smoothforge.quad_ideals.fields import QuadField, RationalField
from smoothforge.smooth_q.sieve import build_sieve


@pytest.fixture(scope="session")
def table():
    return build_rho_table(Fraction(1, 1024), 32.0)


@pytest.fixture(scope="session")
def sieve():
    return build_sieve(10 ** 6)


@pytest.fixture(scope="session")
def evaluator():
    return XiEvaluator(1e-12)


@pytest.fixture(scope="session")
def gaussian():
    """Q(i)"""
    return QuadField(-1)


@pytest.fixture(scope="session")
def eisenstein():
    """Q(sqrt(-3))"""
    return QuadField(-3)


@pytest.fixture(scope="session")
def rationals():
    return RationalField()
