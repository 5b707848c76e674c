"""Population tables: parsing, alignment, canonical export and synthetic fixtures."""
import logging
import math
import re
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from sfmaxent.errors import DataFormatError, DomainError, InsufficientDataError, OutputError
from sfmaxent.models.equilibrium import EquilibriumModel
from sfmaxent.models.series import ColumnSchema, Place, SnapshotSeries
from sfmaxent.services import maxent_service
from sfmaxent.services.config_file import load_key_value

logger = logging.getLogger(__name__)

LONG_COLUMNS = ['place_id', 'name', 'year', 'population']
_YEAR_KEY = re.compile(r'^year\.(\d{4})$')
_POP_COLUMN = re.compile(r'^pop_(\d{4})$')
_PARSER_LINE = re.compile(r'line (\d+)')


def load_schema(path: Union[str, Path]) -> ColumnSchema:
    """Read `id = ...`, `name = ...`, `year.<YYYY> = <column>` from a key = value file."""
    values = load_key_value(path)
    if 'id' not in values:
        raise DataFormatError(f"schema {path} has no 'id' column")
    year_columns = {}
    for key, column in values.items():
        match = _YEAR_KEY.match(key)
        if match:
            year_columns[int(match.group(1))] = str(column)
    return ColumnSchema(id_column=str(values['id']),
                        name_column=str(values['name']) if 'name' in values else None,
                        year_columns=year_columns)


def infer_schema(columns: Sequence[str]) -> ColumnSchema:
    """Schema for tables with place_id, name and pop_<YYYY> columns."""
    year_columns = {int(m.group(1)): col for col in columns if (m := _POP_COLUMN.match(col))}
    if 'place_id' not in columns:
        raise DataFormatError("cannot infer schema: no place_id column")
    return ColumnSchema(id_column='place_id',
                        name_column='name' if 'name' in columns else None,
                        year_columns=year_columns)


def _read_frame(source) -> pd.DataFrame:
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, skipinitialspace=True,
                            encoding='utf-8')
    except pd.errors.EmptyDataError as e:
        raise DataFormatError("no usable rows") from e
    except pd.errors.ParserError as e:
        match = _PARSER_LINE.search(str(e))
        raise DataFormatError(f"malformed row: {e}", line=int(match.group(1)) if match else None) from e
    except UnicodeDecodeError as e:
        raise DataFormatError(f"input is not UTF-8: {e}") from e
    except OSError as e:
        raise OutputError(f"cannot read {source}: {e}") from e
    return frame.fillna('')


def _parse_count(raw: str, line: int, column: str) -> int:
    text = raw.strip().replace(',', '')
    if not text:
        return 0
    try:
        value = float(text)
    except ValueError:
        raise DataFormatError(f"population {raw!r} in column '{column}' is not a number", line=line) from None
    if not math.isfinite(value) or value < 0:
        raise DataFormatError(f"population {raw!r} in column '{column}' is invalid", line=line)
    if not value.is_integer():
        raise DataFormatError(f"population {raw!r} in column '{column}' is not a whole count", line=line)
    return int(value)


def parse_population_csv(source, schema: ColumnSchema) -> SnapshotSeries:
    """Parse a wide census table (one row per place, one column per year)."""
    return _series_from_wide(_read_frame(source), schema)


def _series_from_wide(frame: pd.DataFrame, schema: ColumnSchema) -> SnapshotSeries:
    required = [schema.id_column, *schema.year_columns.values()]
    if schema.name_column:
        required.append(schema.name_column)
    missing = [col for col in required if col not in frame.columns]
    if missing:
        raise DataFormatError(f"missing columns {missing}")

    places: List[Place] = []
    populations: Dict[Tuple[str, int], int] = {}
    seen = set()
    for offset, row in enumerate(frame.to_dict('records')):
        line = offset + 2
        place_id = row[schema.id_column].strip()
        if not place_id:
            raise DataFormatError("empty place id", line=line)
        if place_id in seen:
            raise DataFormatError(f"duplicate place_id '{place_id}'", line=line)
        seen.add(place_id)
        places.append(Place(place_id, row[schema.name_column].strip() if schema.name_column else ''))
        for year, column in schema.year_columns.items():
            count = _parse_count(row[column], line, column)
            if count > 0:
                populations[(place_id, year)] = count

    if not populations:
        raise DataFormatError("no usable rows")
    logger.info(f"Parsed {len(places)} places over years {sorted(schema.year_columns)}")
    return SnapshotSeries(places=tuple(places), years=tuple(sorted(schema.year_columns)),
                          populations=populations)


def read_series_csv(source) -> SnapshotSeries:
    """Parse the canonical long format place_id,name,year,population."""
    return _series_from_long(_read_frame(source))


def load_place_ids(path: Union[str, Path]) -> List[str]:
    """One place_id per line; blank lines and `#` comments are skipped."""
    try:
        with open(path, encoding='utf-8') as stream:
            ids = [line.split('#', 1)[0].strip() for line in stream]
    except OSError as e:
        raise OutputError(f"cannot read place list {path}: {e}") from e
    ids = [pid for pid in ids if pid]
    if not ids:
        raise DataFormatError(f"place list {path} is empty")
    return ids


def load_table(source, schema_path: Union[str, Path, None] = None,
               include_path: Union[str, Path, None] = None) -> SnapshotSeries:
    """Wide table mapped by a schema file, the long format, or a pop_<YYYY> wide table.

    With include_path only the listed places are kept.
    """
    if schema_path:
        series = parse_population_csv(source, load_schema(schema_path))
    else:
        frame = _read_frame(source)
        if set(LONG_COLUMNS) <= set(frame.columns):
            series = _series_from_long(frame)
        else:
            series = _series_from_wide(frame, infer_schema(list(frame.columns)))
    if not include_path:
        return series

    wanted = load_place_ids(include_path)
    unknown = set(wanted) - set(series.place_ids)
    if unknown:
        logger.warning(f"{len(unknown)} listed places are not in the table")
    kept = series.restricted(wanted)
    if not kept.populations:
        raise InsufficientDataError(f"no listed place from {include_path} is in the table")
    logger.info(f"Kept {len(kept.places)} of {len(series.places)} places from {include_path}")
    return kept


def _series_from_long(frame: pd.DataFrame) -> SnapshotSeries:
    missing = [col for col in LONG_COLUMNS if col not in frame.columns]
    if missing:
        raise DataFormatError(f"missing columns {missing}")

    names: Dict[str, str] = {}
    populations: Dict[Tuple[str, int], int] = {}
    years = set()
    seen = set()
    for offset, row in enumerate(frame.to_dict('records')):
        line = offset + 2
        place_id = row['place_id'].strip()
        if not place_id:
            raise DataFormatError("empty place id", line=line)
        try:
            year = int(row['year'])
        except ValueError:
            raise DataFormatError(f"year {row['year']!r} is not an integer", line=line) from None
        if (place_id, year) in seen:
            raise DataFormatError(f"duplicate entry for '{place_id}' in {year}", line=line)
        seen.add((place_id, year))
        names.setdefault(place_id, row['name'].strip())
        years.add(year)
        count = _parse_count(row['population'], line, 'population')
        if count > 0:
            populations[(place_id, year)] = count

    if not populations:
        raise DataFormatError("no usable rows")
    return SnapshotSeries(places=tuple(Place(pid, name) for pid, name in names.items()),
                          years=tuple(sorted(years)), populations=populations)


def write_series_csv(series: SnapshotSeries, path: Union[str, Path]) -> Path:
    """Export in the canonical long format."""
    path = Path(path)
    try:
        series.to_frame().to_csv(path, index=False)
    except OSError as e:
        raise OutputError(f"cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(series.places)} places to {path}")
    return path


def common_places(series: SnapshotSeries, t1: int, t2: int) -> SnapshotSeries:
    """Restrict to places with populations in both t1 and t2; order is kept."""
    for year in (t1, t2):
        if not series.has_year(year):
            raise DomainError(f"year {year} not in series {list(series.years)}")
    both = [pid for pid in series.place_ids
            if (pid, t1) in series.populations and (pid, t2) in series.populations]
    if not both:
        raise InsufficientDataError(f"no place is observed in both {t1} and {t2}")
    return series.restricted(both)


def synthesize_fixture(model: EquilibriumModel, n_places: int, years: Iterable[int],
                       K: float, seed: int) -> SnapshotSeries:
    """Census-like table: first year sampled from the model, later years by log-space GBM.

    u(t2) = u(t1) + sqrt(K (t2 - t1)) z; populations are rounded with a floor of 1.
    """
    years = tuple(sorted(set(int(y) for y in years)))
    if not years:
        raise DomainError("a fixture needs at least one year")
    if n_places < 1:
        raise DomainError(f"n_places must be >= 1, got {n_places}")
    if K < 0:
        raise DomainError(f"K must be nonnegative, got {K}")

    rng = np.random.default_rng(seed)
    sizes = np.asarray(maxent_service.quantile_x(model, rng.random(n_places)), dtype=float)
    places = tuple(Place(f"P{i:05d}", f"Place {i}") for i in range(1, n_places + 1))
    populations: Dict[Tuple[str, int], int] = {}
    previous = years[0]
    for year in years:
        if year != previous:
            sizes = sizes * np.exp(math.sqrt(K * (year - previous)) * rng.standard_normal(n_places))
            previous = year
        counts = np.maximum(1, np.rint(np.minimum(sizes, 1e18))).astype(np.int64)
        for place, count in zip(places, counts.tolist()):
            populations[(place.place_id, year)] = count
    logger.info(f"Synthesized {n_places} places over {list(years)} (K={K}, seed={seed})")
    return SnapshotSeries(places=places, years=years, populations=populations)
