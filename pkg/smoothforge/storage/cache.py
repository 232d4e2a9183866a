#!/usr/bin/env python3
"""
On-disk caches for the rho table and the smallest-prime-factor sieve
"""

import io
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from smoothforge.config.settings import CACHE_DIR_ENV
from smoothforge.dickman_xi.rho_table import RhoTable
from smoothforge.errors import CacheFormatError

logger = logging.getLogger(__name__)

RHO_HEADER_PREFIX = "# rho-table v1, step="


def default_cache_dir() -> Path:
    """SMOOTHFORGE_CACHE_DIR if set, else ~/.cache/smoothforge"""
    env = os.environ.get(CACHE_DIR_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "smoothforge"


def write_rho_csv(table: RhoTable, handle: io.TextIOBase) -> None:
    """Versioned header, then one u,rho row per grid point at 17 significant digits"""
    handle.write(f"{RHO_HEADER_PREFIX}{table.step.numerator}/{table.step.denominator}\n")
    frame = pd.DataFrame({"u": table.grid, "rho": table.values})
    frame.to_csv(handle, index=False, float_format="%.17g", lineterminator="\n")


def read_rho_csv(path: Path) -> RhoTable:
    """Parse a table written by write_rho_csv"""
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().strip()
        if not header.startswith(RHO_HEADER_PREFIX):
            raise CacheFormatError(f"{path}: unexpected header {header!r}")
        try:
            step = Fraction(header[len(RHO_HEADER_PREFIX):])
        except (ValueError, ZeroDivisionError) as exc:
            raise CacheFormatError(f"{path}: bad step in header {header!r}") from exc
        frame = pd.read_csv(handle, dtype=np.float64, float_precision="round_trip")

    if list(frame.columns) != ["u", "rho"]:
        raise CacheFormatError(f"{path}: expected columns u,rho, got {list(frame.columns)}")
    expected = np.arange(len(frame), dtype=np.float64) * float(step)
    if not np.allclose(frame["u"].to_numpy(), expected, rtol=0.0, atol=1e-12):
        raise CacheFormatError(f"{path}: u column does not match step {step}")
    return RhoTable(step, frame["rho"].to_numpy())


class CacheStore:
    """Cache directory holding rho-<p>_<q>-<umax>.csv and spf-<limit>.npy files"""

    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else default_cache_dir()

    def _ensure(self) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        return self.root

    def rho_path(self, step: Fraction, u_max: float) -> Path:
        return self.root / f"rho-{step.numerator}_{step.denominator}-{u_max:g}.csv"

    def spf_path(self, limit: int) -> Path:
        return self.root / f"spf-{limit}.npy"

    def save_rho_table(self, table: RhoTable, u_max: float) -> Path:
        path = self._ensure() / self.rho_path(table.step, u_max).name
        with open(path, "w", encoding="utf-8", newline="") as handle:
            write_rho_csv(table, handle)
        logger.debug("saved rho table to %s", path)
        return path

    def load_rho_table(self, step: Fraction, u_max: float) -> Optional[RhoTable]:
        """Cached table for (step, u_max), or None on a miss"""
        path = self.rho_path(step, u_max)
        if not path.is_file():
            logger.debug("rho cache miss: %s", path)
            return None
        table = read_rho_csv(path)
        if table.step != step:
            raise CacheFormatError(f"{path}: step {table.step} does not match {step}")
        logger.debug("rho cache hit: %s", path)
        return table

    def save_spf(self, limit: int, spf: np.ndarray) -> Path:
        path = self._ensure() / self.spf_path(limit).name
        np.save(path, spf)
        logger.debug("saved sieve to %s", path)
        return path

    def load_spf(self, limit: int) -> Optional[np.ndarray]:
        path = self.spf_path(limit)
        if not path.is_file():
            logger.debug("sieve cache miss: %s", path)
            return None
        spf = np.load(path)
        if spf.ndim != 1 or len(spf) != limit + 1:
            raise CacheFormatError(f"{path}: expected {limit + 1} entries, found {spf.shape}")
        logger.debug("sieve cache hit: %s", path)
        return spf
