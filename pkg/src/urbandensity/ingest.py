"""CSV ingestion for parcel tables and longitudinal series.

Two file shapes are understood.  A parcel CSV carries one parcel per row
with columns ``parcel_id,population,area_ha`` plus optional ``parent_id``
(ties the row to a coarser table, enabling refinement checks) and
``region_id``.  A series CSV carries one year of regional totals per row
with columns ``year,population,area_ha`` plus optional ``pwd_reference``
and ``od_reference`` annotation columns; annotations are carried through
for display and comparison but never recomputed, since totals alone cannot
yield a PWD.  Unknown extra columns are ignored so raw census exports load
without preprocessing.

Errors name the offending row by its line number in the file.  Writing uses
17 significant digits, which round-trips any float exactly.

The package bundles the Melbourne census aggregates used throughout the
tests: the growing urban centre 1976-2011 and two fixed-boundary cuts
(the inner core and the area already established by 1981), each with the
source's printed density and PWD columns as annotations.
"""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import IO, Iterable, Iterator

from .metrics import Parcel, ParcelTable, pwd as _pwd
from .subdivision import RefinementMap

_FLOAT_FMT = ".17g"

PARCEL_COLUMNS = ("parcel_id", "population", "area_ha")
SERIES_COLUMNS = ("year", "population", "area_ha")


def _text_lines(source: str | os.PathLike | IO) -> tuple[IO, bool]:
    """Open ``source`` for text reading; second item says whether we own it."""
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    if hasattr(source, "read"):
        return io.TextIOWrapper(source, encoding="utf-8", newline=""), False
    raise TypeError(f"cannot read parcel data from {type(source).__name__}")


def _parse_float(raw: str, column: str, line: int) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise ValueError(
            f"row {line}: cannot parse {column} value {raw!r}"
        ) from None


def _require_columns(fieldnames, required: Iterable[str], what: str) -> None:
    have = set(fieldnames or ())
    for col in required:
        if col not in have:
            raise ValueError(f"{what}: missing required column {col!r}")


def _read_parcel_rows(
    source,
) -> tuple[list[Parcel], dict[str, str] | None, str | None]:
    handle, owned = _text_lines(source)
    try:
        reader = csv.DictReader(handle)
        _require_columns(reader.fieldnames, PARCEL_COLUMNS, "parcel CSV")
        has_parent = "parent_id" in reader.fieldnames
        has_region = "region_id" in reader.fieldnames
        parcels: list[Parcel] = []
        parent_of: dict[str, str] = {}
        region_id: str | None = None
        seen: set[str] = set()
        for row in reader:
            line = reader.line_num
            pid = (row.get("parcel_id") or "").strip()
            if not pid:
                raise ValueError(f"row {line}: empty parcel_id")
            if pid in seen:
                raise ValueError(f"row {line}: duplicate parcel id {pid!r}")
            seen.add(pid)
            population = _parse_float(row["population"], "population", line)
            area = _parse_float(row["area_ha"], "area_ha", line)
            try:
                parcels.append(Parcel(pid, population, area))
            except ValueError as exc:
                raise ValueError(f"row {line}: {exc}") from None
            if has_parent:
                parent = (row.get("parent_id") or "").strip()
                if not parent:
                    raise ValueError(f"row {line}: empty parent_id")
                parent_of[pid] = parent
            if has_region and region_id is None:
                region_id = (row.get("region_id") or "").strip() or None
        if not parcels:
            raise ValueError("parcel CSV: no data rows")
        return parcels, (parent_of if has_parent else None), region_id
    finally:
        if owned:
            handle.close()


def read_parcels(source, region_id: str | None = None, label: str | None = None) -> ParcelTable:
    """Read a parcel CSV into a ParcelTable.

    ``region_id`` defaults to the file's region_id column when present.
    """
    parcels, _, file_region = _read_parcel_rows(source)
    return ParcelTable(
        tuple(parcels),
        region_id=region_id or file_region or "region",
        label=label,
    )


def read_refinement(fine_source, coarse_source) -> RefinementMap:
    """Read a fine parcel CSV (with parent_id) and its coarse counterpart.

    The map is structural only; run validate_refinement or
    check_monotonicity on it to test conservation.
    """
    parcels, parent_of, file_region = _read_parcel_rows(fine_source)
    if parent_of is None:
        raise ValueError("fine parcel CSV must carry a parent_id column")
    fine = ParcelTable(tuple(parcels), region_id=file_region or "region")
    coarse = read_parcels(coarse_source)
    return RefinementMap(fine=fine, coarse=coarse, parent_of=parent_of)


def write_parcels(table: ParcelTable, dest, parent_of: dict[str, str] | None = None) -> None:
    """Write a parcel CSV that reads back bit-identically."""
    handle, owned = (
        (open(dest, "w", encoding="utf-8", newline=""), True)
        if isinstance(dest, (str, os.PathLike))
        else (dest, False)
    )
    try:
        columns = list(PARCEL_COLUMNS)
        if parent_of is not None:
            columns.append("parent_id")
        writer = csv.writer(handle)
        writer.writerow(columns)
        for p in table.parcels:
            row = [p.id, format(p.population, _FLOAT_FMT), format(p.area, _FLOAT_FMT)]
            if parent_of is not None:
                row.append(parent_of[p.id])
            writer.writerow(row)
    finally:
        if owned:
            handle.close()


@dataclass(frozen=True)
class SeriesRow:
    """One year of a region: totals, optional full table, optional annotations.

    With only totals, OD is available but PWD is not (it needs parcels).
    ``pwd_reference`` and ``od_reference`` are values carried from the data
    source for display and comparison; they are never recomputed here.
    """

    year: int
    population: float
    area_ha: float
    table: ParcelTable | None = None
    pwd_reference: float | None = None
    od_reference: float | None = None

    def __post_init__(self) -> None:
        if not self.area_ha > 0:
            raise ValueError(f"year {self.year}: area must be positive, got {self.area_ha}")
        if not self.population >= 0:
            raise ValueError(
                f"year {self.year}: population must be >= 0, got {self.population}"
            )
        if self.table is not None:
            for name, mine, tabled in (
                ("population", self.population, self.table.total_population),
                ("area", self.area_ha, self.table.total_area),
            ):
                if abs(mine - tabled) > 1e-9 * max(abs(mine), abs(tabled)):
                    raise ValueError(
                        f"year {self.year}: row {name} {mine} disagrees with its "
                        f"parcel table ({tabled})"
                    )

    @classmethod
    def from_table(
        cls,
        year: int,
        table: ParcelTable,
        pwd_reference: float | None = None,
        od_reference: float | None = None,
    ) -> "SeriesRow":
        return cls(
            year=year,
            population=table.total_population,
            area_ha=table.total_area,
            table=table,
            pwd_reference=pwd_reference,
            od_reference=od_reference,
        )

    def overall_density(self) -> float:
        return self.population / self.area_ha

    def pwd(self) -> float | None:
        """PWD when a full table is attached, else None (not computable)."""
        return _pwd(self.table) if self.table is not None else None


@dataclass(frozen=True)
class LongitudinalSeries:
    """A region tracked over census years, strictly increasing in year."""

    label: str
    rows: tuple[SeriesRow, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        if not self.rows:
            raise ValueError("a series needs at least one row")
        years = [r.year for r in self.rows]
        for a, b in zip(years, years[1:]):
            if b <= a:
                raise ValueError(f"years must be strictly increasing ({a} then {b})")

    def __iter__(self) -> Iterator[SeriesRow]:
        return iter(self.rows)

    def __len__(self) -> int:
        return len(self.rows)


def _optional_float(row: dict, column: str, line: int) -> float | None:
    raw = (row.get(column) or "").strip()
    if not raw:
        return None
    return _parse_float(raw, column, line)


def read_series(source, label: str | None = None) -> LongitudinalSeries:
    """Read a totals-per-year series CSV."""
    handle, owned = _text_lines(source)
    try:
        reader = csv.DictReader(handle)
        _require_columns(reader.fieldnames, SERIES_COLUMNS, "series CSV")
        rows: list[SeriesRow] = []
        for row in reader:
            line = reader.line_num
            raw_year = (row.get("year") or "").strip()
            try:
                year = int(raw_year)
            except ValueError:
                raise ValueError(f"row {line}: cannot parse year {raw_year!r}") from None
            population = _parse_float(row["population"], "population", line)
            area = _parse_float(row["area_ha"], "area_ha", line)
            try:
                rows.append(
                    SeriesRow(
                        year=year,
                        population=population,
                        area_ha=area,
                        pwd_reference=_optional_float(row, "pwd_reference", line),
                        od_reference=_optional_float(row, "od_reference", line),
                    )
                )
            except ValueError as exc:
                raise ValueError(f"row {line}: {exc}") from None
        if not rows:
            raise ValueError("series CSV: no data rows")
        return LongitudinalSeries(label=label or "series", rows=tuple(rows))
    finally:
        if owned:
            handle.close()


MELBOURNE_URBAN_CENTRE = "melbourne_urban_centre"
MELBOURNE_INNER = "melbourne_inner"
MELBOURNE_ESTABLISHED_1981 = "melbourne_established_1981"

_BUNDLED = (MELBOURNE_URBAN_CENTRE, MELBOURNE_INNER, MELBOURNE_ESTABLISHED_1981)


def reference_series_names() -> tuple[str, ...]:
    """Names accepted by load_reference_series."""
    return _BUNDLED


def load_reference_series(name: str) -> LongitudinalSeries:
    """Load one of the bundled Melbourne census series by name."""
    if name not in _BUNDLED:
        raise ValueError(f"unknown reference series {name!r}; have {_BUNDLED}")
    resource = resources.files("urbandensity").joinpath(f"data/{name}.csv")
    with resource.open("r", encoding="utf-8") as handle:
        return read_series(handle, label=name)
