"""Multi-year population tables."""
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from sfmaxent.errors import DataFormatError, DomainError


@dataclass(frozen=True)
class Place:
    place_id: str
    name: str = ''


@dataclass(frozen=True)
class ColumnSchema:
    """Maps a wide census table onto a SnapshotSeries.

    Attributes:
        id_column: column holding the place identifier
        name_column: column holding the display name (optional)
        year_columns: year -> population column
    """
    id_column: str
    name_column: Optional[str] = None
    year_columns: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.year_columns:
            raise DataFormatError("schema names no population columns")


@dataclass(frozen=True)
class SnapshotSeries:
    """Places with populations across one or more observation years.

    A (place, year) pair without a positive population is simply absent.
    """
    places: Tuple[Place, ...]
    years: Tuple[int, ...]
    populations: Mapping[Tuple[str, int], int]

    def __post_init__(self):
        object.__setattr__(self, 'places', tuple(self.places))
        object.__setattr__(self, 'years', tuple(int(y) for y in self.years))
        if not self.years:
            raise DataFormatError("a series needs at least one year")
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise DataFormatError(f"years must be strictly increasing, got {list(self.years)}")
        ids = [p.place_id for p in self.places]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise DataFormatError(f"duplicate place_id '{dup}'")
        for key, value in self.populations.items():
            if value <= 0:
                raise DataFormatError(f"population for {key} must be positive, got {value}")

    @property
    def place_ids(self) -> List[str]:
        return [p.place_id for p in self.places]

    def has_year(self, year: int) -> bool:
        return year in self.years

    def population(self, place_id: str, year: int) -> Optional[int]:
        return self.populations.get((place_id, year))

    def values(self, year: int) -> np.ndarray:
        """Populations observed in `year`, in place order."""
        if year not in self.years:
            raise DomainError(f"year {year} not in series {list(self.years)}")
        return np.array([self.populations[(pid, year)] for pid in self.place_ids
                         if (pid, year) in self.populations], dtype=float)

    def observed(self, year: int) -> Dict[str, int]:
        """place_id -> population for the places observed in `year`."""
        return {pid: self.populations[(pid, year)] for pid in self.place_ids
                if (pid, year) in self.populations}

    def top_ids(self, year: int, n: int) -> List[str]:
        """Ids of the n most populated places of `year`; ties keep place order."""
        obs = self.observed(year)
        ranked = sorted(obs, key=lambda pid: -obs[pid])
        return ranked[:n]

    def year_pairs(self) -> Iterator[Tuple[int, int]]:
        return zip(self.years, self.years[1:])

    def to_frame(self) -> pd.DataFrame:
        """Canonical long format: place_id, name, year, population.

        A place never observed gets one row with an empty population so it survives a round trip.
        """
        rows = []
        for place in self.places:
            observed = [(place.place_id, place.name, year, self.populations[(place.place_id, year)])
                        for year in self.years if (place.place_id, year) in self.populations]
            rows.extend(observed or [(place.place_id, place.name, self.years[0], None)])
        frame = pd.DataFrame(rows, columns=['place_id', 'name', 'year', 'population'])
        frame['population'] = frame['population'].astype('Int64')
        return frame

    def restricted(self, place_ids: Sequence[str]) -> 'SnapshotSeries':
        keep = set(place_ids)
        return SnapshotSeries(
            places=tuple(p for p in self.places if p.place_id in keep),
            years=self.years,
            populations={k: v for k, v in self.populations.items() if k[0] in keep},
        )
