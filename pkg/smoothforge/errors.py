#!/usr/bin/env python3
"""
Error hierarchy shared by every SmoothForge module
"""

from typing import Optional


class SmoothForgeError(Exception):
    """Base class for all SmoothForge errors"""

    exit_code = 1


class DomainError(SmoothForgeError, ValueError):
    """Argument lies outside the mathematical domain of an operation"""

    exit_code = 2


class OutOfRangeError(DomainError):
    """Query beyond a tabulated range"""

    def __init__(self, what: str, value: float, limit: float):
        self.what = what
        self.value = value
        self.limit = limit
        super().__init__(f"{what}={value} exceeds the table limit {limit}")


class CapExceededError(SmoothForgeError):
    """A configured resource cap would be exceeded"""

    exit_code = 3

    def __init__(self, cap_name: str, requested: float, cap: float,
                 detail: Optional[str] = None):
        self.cap_name = cap_name
        self.requested = requested
        self.cap = cap
        message = f"{cap_name} exceeded: requested {requested:g}, cap is {cap:g}"
        if detail:
            message += f" ({detail})"
        super().__init__(message)


class ConstructionError(SmoothForgeError):
    """A construction could not be completed with the given parameters"""


class ConfigError(SmoothForgeError, ValueError):
    """Invalid configuration value or file"""

    exit_code = 2


class CacheFormatError(SmoothForgeError):
    """Cache file with an unexpected header, version or grid"""
