"""Result types of the statistics service."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class RankSize:
    """Sizes sorted nonincreasing against 1-based ranks."""
    ranks: np.ndarray
    sizes: np.ndarray

    def __len__(self) -> int:
        return int(self.sizes.size)

    def top(self, n: int) -> 'RankSize':
        """The n largest entries."""
        return RankSize(self.ranks[:n], self.sizes[:n])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'rank': self.ranks, 'size': self.sizes})


@dataclass(frozen=True)
class GrowthRecord:
    """Log size at the earlier year and its two-point growth rate per year."""
    place_id: str
    u_early: float
    u_dot: float
    interval: Tuple[int, int] = (0, 0)


@dataclass(frozen=True)
class Histogram:
    """Uniform-in-u histogram; density integrates to one over the edges."""
    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'u': self.centers, 'density': self.density})


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r: float
