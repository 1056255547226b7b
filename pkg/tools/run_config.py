#!/usr/bin/env python3
"""
Run configuration shared by every command: bounds, seed, workers and limits.
"""

import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from algebra.errors import BoundsExceeded, OutOfRange
from algebra.field_space import DEFAULT_MAX_POINTS, DEFAULT_MAX_PRIME, FieldSpace, check_prime, field_space
from algebra.perm_engine import DEFAULT_ORBIT_LIMIT
from reducts.classification import MAX_CATALOG_POINTS, MAX_SIGMA_GROUP_DEGREE
from reducts.geometry import MAX_BRUTE_R_POINTS
from reducts.interval_enum import MAX_ENUMERATION_POINTS

logger = logging.getLogger(__name__)

MAX_PRIME = DEFAULT_MAX_PRIME
MAX_GEOMETRY_POINTS = DEFAULT_MAX_POINTS
DEFAULT_MAX_ORBIT = DEFAULT_ORBIT_LIMIT
DEFAULT_SEED = 0

WORKERS_ENV = "REDUCT_ATLAS_WORKERS"
LOG_LEVEL_ENV = "REDUCT_ATLAS_LOG_LEVEL"

# p^n bound per command; everything else uses MAX_GEOMETRY_POINTS
COMMAND_POINT_BOUNDS = {
    "catalog": MAX_CATALOG_POINTS,
    "enumerate": MAX_ENUMERATION_POINTS,
}

__all__ = [
    "RunConfig", "MAX_PRIME", "MAX_GEOMETRY_POINTS", "MAX_CATALOG_POINTS",
    "MAX_ENUMERATION_POINTS", "MAX_BRUTE_R_POINTS", "MAX_SIGMA_GROUP_DEGREE",
    "DEFAULT_MAX_ORBIT", "DEFAULT_SEED", "default_workers", "default_log_level",
]


def default_workers() -> int:
    """Worker count from REDUCT_ATLAS_WORKERS, 1 when unset."""
    raw = os.environ.get(WORKERS_ENV, "")
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        raise OutOfRange(f"{WORKERS_ENV} must be an integer, got {raw!r}")
    logger.info(f"Workers from environment: {workers}")
    return workers


def default_log_level() -> str:
    return os.environ.get(LOG_LEVEL_ENV, "INFO").upper()


@dataclass
class RunConfig:
    command: str
    p: int
    n: int
    seed: int = DEFAULT_SEED
    workers: int = 1
    inputs: List[Path] = field(default_factory=list)
    out: Optional[Path] = None
    max_degree: Optional[int] = None
    max_orbit: int = DEFAULT_MAX_ORBIT
    time_limit: Optional[float] = None
    allow_large: bool = False
    samples: int = 1000
    started: float = field(default_factory=time.monotonic)

    def point_bound(self) -> int:
        if self.max_degree is not None:
            return self.max_degree
        return COMMAND_POINT_BOUNDS.get(self.command, MAX_GEOMETRY_POINTS)

    def validate(self) -> "RunConfig":
        self.p = check_prime(self.p, MAX_PRIME)
        if self.n < 1:
            raise OutOfRange(f"n must be at least 1, got {self.n}")
        if self.workers < 1:
            raise OutOfRange(f"workers must be at least 1, got {self.workers}")
        if self.max_orbit < 1:
            raise OutOfRange(f"max orbit must be positive, got {self.max_orbit}")
        size = self.p ** self.n
        if size > MAX_GEOMETRY_POINTS:
            raise BoundsExceeded(f"p^n = {size} exceeds the hard limit {MAX_GEOMETRY_POINTS}",
                                 {"p": self.p, "n": self.n})
        bound = self.point_bound()
        if size > bound:
            if not self.allow_large:
                raise BoundsExceeded(
                    f"{self.command} is limited to p^n <= {bound}, got {size}; pass --allow-large to override",
                    {"p": self.p, "n": self.n, "bound": bound})
            logger.warning(f"{self.command} with p^n = {size} above the usual bound {bound}; expect long runs")
        return self

    @property
    def deadline(self) -> Optional[float]:
        if self.time_limit is None:
            return None
        return self.started + self.time_limit

    def effective_bound(self) -> int:
        """Point bound passed to the library, lifted when --allow-large is set."""
        bound = self.point_bound()
        return max(bound, self.p ** self.n) if self.allow_large else bound

    def space(self) -> FieldSpace:
        return field_space(self.p, self.n)
