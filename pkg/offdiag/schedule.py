import math

from dataclasses import dataclass
from typing import Tuple

import numpy as np

import offdiag.exceptions
import offdiag.writer

# offdiag.schedule -- parameter sweeps: epsilon ladders, lambda grids and
# refinement depth ranges. all three parse from the compact command-line forms
# "k0:k1", "start:stop:count" and "d0..d1".


@dataclass(frozen=True)
class EpsilonSchedule:
    """ Geometric ladder eps_k = scale * 2**-k, k = k0..k1, strictly decreasing. """
    k0: int = 10
    k1: int = 40
    scale: float = 1.0

    def __post_init__(self):
        if self.k1 <= self.k0:
            raise offdiag.exceptions.InvalidConfigValue("eps", f"need k0 < k1, got {self.k0}:{self.k1}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise offdiag.exceptions.InvalidConfigValue("eps", f"scale must be positive, got {self.scale}")

    @classmethod
    def parse(cls, text: str, scale: float = 1.0) -> 'EpsilonSchedule':
        try:
            k0, k1 = (int(part) for part in text.split(':'))
        except ValueError:
            raise offdiag.exceptions.InvalidConfigValue("eps", f"expected k0:k1, got '{text}'")
        return cls(k0, k1, scale)

    def scaled(self, scale: float) -> 'EpsilonSchedule':
        return EpsilonSchedule(self.k0, self.k1, scale)

    def values(self) -> np.ndarray:
        return self.scale * np.exp2(-np.arange(self.k0, self.k1 + 1, dtype=float))

    def clipped(self, resolution: float) -> np.ndarray:
        """
        Ladder restricted to eps >= :attr:`resolution`. If fewer than four
        rungs survive, eight rungs resolution * 2**j, j = 7..0 are used instead.
        """
        eps = self.values()
        if resolution <= 0: return eps
        kept = eps[eps >= resolution]
        if kept.size >= 4: return kept
        offdiag.writer.debug(f"eps ladder clipped below resolution {resolution:.3e}, using 8 rungs above it")
        return resolution * np.exp2(np.arange(7, -1, -1, dtype=float))


@dataclass(frozen=True)
class Grid:
    """ Uniform lambda grid with :attr:`count` points from start to stop inclusive. """
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if not self.start < self.stop:
            raise offdiag.exceptions.InvalidConfigValue("grid", f"need start < stop, got {self.start}:{self.stop}")
        if self.count < 1:
            raise offdiag.exceptions.InvalidConfigValue("grid", f"need count >= 1, got {self.count}")

    @classmethod
    def parse(cls, text: str) -> 'Grid':
        parts = text.split(':')
        try:
            if len(parts) != 3: raise ValueError()
            return cls(float(parts[0]), float(parts[1]), int(parts[2]))
        except ValueError:
            raise offdiag.exceptions.InvalidConfigValue("grid", f"expected start:stop:count, got '{text}'")

    def values(self) -> np.ndarray:
        if self.count == 1: return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class DepthRange:
    """ Ascending refinement depths d0..d1 inclusive. """
    d0: int
    d1: int

    def __post_init__(self):
        if self.d0 < 0 or self.d1 < self.d0:
            raise offdiag.exceptions.InvalidConfigValue("depths", f"need 0 <= d0 <= d1, got {self.d0}..{self.d1}")

    @classmethod
    def parse(cls, text: str) -> 'DepthRange':
        try:
            d0, d1 = (int(part) for part in text.split('..'))
        except ValueError:
            raise offdiag.exceptions.InvalidConfigValue("depths", f"expected d0..d1, got '{text}'")
        return cls(d0, d1)

    def values(self) -> Tuple[int, ...]:
        return tuple(range(self.d0, self.d1 + 1))

    @property
    def final(self) -> int: return self.d1
