"""Parcel-level population density measures.

A region divided into land parcels admits more than one natural "density".
This module implements the three measures this package is built around:

* overall density (``od``): total population over total area, which is also
  the area-weighted arithmetic mean of the parcel densities;
* population-weighted density (``pwd``): the mean of parcel densities
  weighted by each parcel's share of the population, i.e. the density at
  which the average resident lives;
* density-weighted population (``dwp``): the population re-counted with each
  resident weighted by the density of their parcel relative to a reference
  density (the region's own overall density unless one is supplied).

PWD and DWP are two views of one quantity: with the default reference,
``dwp == pwd * total_area`` and ``dgi == pwd / od == dwp / total_population``.
The ratio ``dgi`` is dimensionless and equals 1 exactly when everyone lives
at the same density.

PWD is never below OD.  The proof runs through weighted means: OD is the
population-weighted *harmonic* mean of the parcel densities while PWD is the
population-weighted *arithmetic* mean, and the harmonic mean never exceeds
the arithmetic one.  The weighted-mean helpers live here for that reason,
together with ``pwd_gap_bound``, a closed-form lower bound on the reciprocal
gap ``1/od - 1/pwd`` for tables of equal-population parcels.

Areas are hectares and densities persons per hectare throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

_REL_TOL = 1e-12


@dataclass(frozen=True)
class Parcel:
    """One land unit: an identifier, a resident count, and an area in hectares.

    Population is a nonnegative real (census counts are often jittered or
    interpolated, so integers are not assumed).  Zero-area parcels are
    rejected here so density is always defined downstream.
    """

    id: str
    population: float
    area: float

    def __post_init__(self) -> None:
        # "not (x > 0)" instead of "x <= 0" so NaN is rejected too.
        if not self.area > 0:
            raise ValueError(f"parcel {self.id!r}: area must be positive, got {self.area}")
        if not self.population >= 0:
            raise ValueError(
                f"parcel {self.id!r}: population must be >= 0, got {self.population}"
            )

    @property
    def density(self) -> float:
        """Population density of this parcel, persons per hectare."""
        return self.population / self.area


@dataclass(frozen=True)
class ParcelTable:
    """A finite subdivision of one region into parcels at one point in time.

    The table is the unit every metric operates on.  It must be nonempty and
    parcel ids must be unique; totals may include parcels with nobody in them
    (their area counts toward OD but they carry no weight in PWD).
    """

    parcels: tuple[Parcel, ...]
    region_id: str = "region"
    label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "parcels", tuple(self.parcels))
        if not self.parcels:
            raise ValueError("a parcel table needs at least one parcel")
        seen: set[str] = set()
        for p in self.parcels:
            if p.id in seen:
                raise ValueError(f"duplicate parcel id {p.id!r}")
            seen.add(p.id)

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[float, float]],
        region_id: str = "region",
        label: str | None = None,
        id_prefix: str = "p",
    ) -> "ParcelTable":
        """Build a table from (population, area_ha) pairs with generated ids."""
        parcels = tuple(
            Parcel(f"{id_prefix}{i}", float(pop), float(area))
            for i, (pop, area) in enumerate(pairs, start=1)
        )
        return cls(parcels, region_id=region_id, label=label)

    def __len__(self) -> int:
        return len(self.parcels)

    def __iter__(self) -> Iterator[Parcel]:
        return iter(self.parcels)

    @cached_property
    def total_population(self) -> float:
        return math.fsum(p.population for p in self.parcels)

    @cached_property
    def total_area(self) -> float:
        return math.fsum(p.area for p in self.parcels)

    @cached_property
    def populated_area(self) -> float:
        """Total area of parcels with at least one resident."""
        return math.fsum(p.area for p in self.parcels if p.population > 0)

    @cached_property
    def zero_population_area(self) -> float:
        """Total area of parcels with nobody in them."""
        return math.fsum(p.area for p in self.parcels if p.population == 0)

    def by_id(self) -> dict[str, Parcel]:
        return {p.id: p for p in self.parcels}


def overall_density(table: ParcelTable) -> float:
    """Total population divided by total area, persons per hectare.

    Identical to summing populations and areas first, which is why OD is
    insensitive to how the region is cut into parcels.
    """
    return table.total_population / table.total_area


def pwd(table: ParcelTable) -> float:
    """Population-weighted density: sum of (P_k / P0) * (P_k / A_k).

    Parcels with zero population carry zero weight and are skipped, so empty
    land never dilutes the figure (that is the whole point of the measure).
    Raises ValueError when the table holds no population at all, because a
    population-weighted mean over nobody has no value.
    """
    p0 = table.total_population
    if not p0 > 0:
        raise ValueError("empty region: PWD undefined")
    return math.fsum(
        (p.population / p0) * p.density for p in table.parcels if p.population > 0
    )


def dwp(table: ParcelTable, reference_density: float | None = None) -> float:
    """Density-weighted population: residents scaled by relative density.

    Each parcel contributes ``population * (density / reference_density)``.
    When ``reference_density`` is omitted the table's own overall density is
    used, which makes ``dwp / total_area`` coincide with ``pwd``.

    An explicit reference supports stipulated textbook instances whose
    relative densities are given directly.  Note that under the *default*
    reference the population-weighted mean of relative densities of any
    actual table is at least 1, so an instance such as two equal populations
    at relative densities 2 and 1/2 (mean 5/4) is unrealizable as a
    self-referenced table; it only evaluates against an external reference.
    """
    p0 = table.total_population
    if not p0 > 0:
        raise ValueError("empty region: DWP undefined")
    if reference_density is None:
        reference_density = overall_density(table)
    elif not reference_density > 0:
        raise ValueError(f"reference density must be positive, got {reference_density}")
    return math.fsum(
        p.population * (p.density / reference_density)
        for p in table.parcels
        if p.population > 0
    )


@dataclass(frozen=True)
class DensityReport:
    """All density measures for one parcel table, cross-checked on build.

    ``dgi`` is the density gradient index ``pwd / od``.  Construction
    enforces the identities that tie the measures together, so a report can
    only exist in a consistent state.
    """

    od: float
    pwd: float
    dwp: float
    dgi: float
    n_parcels: int
    populated_area: float
    zero_pop_area: float

    def __post_init__(self) -> None:
        total_area = self.populated_area + self.zero_pop_area
        total_population = self.od * total_area
        if self.pwd < self.od * (1.0 - _REL_TOL):
            raise ValueError(
                f"inconsistent report: pwd {self.pwd} below od {self.od}"
            )
        if abs(self.dwp / total_area - self.pwd) > _REL_TOL * abs(self.pwd):
            raise ValueError("inconsistent report: dwp / total_area != pwd")
        if abs(self.dgi - self.dwp / total_population) > _REL_TOL * abs(self.dgi):
            raise ValueError("inconsistent report: dgi != dwp / total_population")

    def as_dict(self) -> dict[str, float | int]:
        return {
            "od": self.od,
            "pwd": self.pwd,
            "dwp": self.dwp,
            "dgi": self.dgi,
            "n_parcels": self.n_parcels,
            "populated_area": self.populated_area,
            "zero_pop_area": self.zero_pop_area,
        }


def density_report(table: ParcelTable) -> DensityReport:
    """Compute every measure for ``table`` (default DWP reference)."""
    od_value = overall_density(table)
    pwd_value = pwd(table)
    return DensityReport(
        od=od_value,
        pwd=pwd_value,
        dwp=dwp(table),
        dgi=pwd_value / od_value,
        n_parcels=len(table),
        populated_area=table.populated_area,
        zero_pop_area=table.zero_population_area,
    )


def _as_positive_floats(values: Iterable[float], what: str) -> list[float]:
    vals = [float(v) for v in values]
    if not vals:
        raise ValueError(f"{what} of empty input")
    for v in vals:
        if not v > 0:
            raise ValueError(f"{what} requires positive values, got {v}")
    return vals


def harmonic_mean(values: Iterable[float]) -> float:
    """N / sum(1/x_k) for positive values."""
    vals = _as_positive_floats(values, "harmonic mean")
    return len(vals) / math.fsum(1.0 / v for v in vals)


def _checked_weights(
    values: Iterable[float], weights: Iterable[float], what: str
) -> tuple[list[float], list[float]]:
    vals = _as_positive_floats(values, what)
    wts = [float(w) for w in weights]
    if len(wts) != len(vals):
        raise ValueError(f"{what}: {len(vals)} values but {len(wts)} weights")
    for w in wts:
        if not w >= 0:
            raise ValueError(f"{what}: weights must be >= 0, got {w}")
    if not math.fsum(wts) > 0:
        raise ValueError(f"{what}: total weight must be positive")
    return vals, wts


def weighted_harmonic_mean(values: Iterable[float], weights: Iterable[float]) -> float:
    """sum(w) / sum(w_k / x_k); zero-weight entries are ignored."""
    vals, wts = _checked_weights(values, weights, "weighted harmonic mean")
    return math.fsum(wts) / math.fsum(w / v for v, w in zip(vals, wts) if w > 0)


def weighted_arithmetic_mean(values: Iterable[float], weights: Iterable[float]) -> float:
    """sum(w_k * x_k) / sum(w); zero-weight entries are ignored."""
    vals, wts = _checked_weights(values, weights, "weighted arithmetic mean")
    return math.fsum(w * v for v, w in zip(vals, wts) if w > 0) / math.fsum(wts)


@dataclass(frozen=True)
class GapBound:
    """Lower bound on the reciprocal gap for equal-population tables.

    ``lhs`` is ``1/od - 1/pwd`` in hectares per person; ``rhs`` is the
    spread-driven bound ``N * var(areas) / (2 * max_area * total_population)``
    with the variance taken over N (not N - 1).  ``holds`` reports
    ``lhs >= rhs`` up to a hair of rounding slack.
    """

    lhs: float
    rhs: float
    holds: bool


def pwd_gap_bound(table: ParcelTable) -> GapBound:
    """Bound the gap between 1/od and 1/pwd by the spread of parcel areas.

    Requires every parcel to hold the same positive population: in that case
    1/od is the plain arithmetic mean of inverse parcel densities and 1/pwd
    is their harmonic mean, and the arithmetic-minus-harmonic gap is at least
    variance / (2 * max value).  Expressed in table terms that is
    ``N * var(areas) / (2 * max_area * total_population)``.
    """
    pops = [p.population for p in table.parcels]
    first = pops[0]
    if not first > 0 or any(p != first for p in pops):
        raise ValueError("bound requires equal parcel populations")
    areas = [p.area for p in table.parcels]
    n = len(areas)
    mean_area = math.fsum(areas) / n
    variance = math.fsum((a - mean_area) ** 2 for a in areas) / n
    rhs = n * variance / (2.0 * max(areas) * table.total_population)
    lhs = 1.0 / overall_density(table) - 1.0 / pwd(table)
    return GapBound(lhs=lhs, rhs=rhs, holds=lhs >= rhs - _REL_TOL * abs(rhs))
