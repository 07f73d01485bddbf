"""Closed-form scenarios where PWD moves against intuition.

Three constructions, each small enough to solve by hand yet sharp enough to
trip up naive longitudinal comparisons:

* a growing city measured on a fixed two-parcel frame, whose PWD falls while
  the true density of the built-up footprint rises;
* a transfer of people across a parcel boundary, whose exact PWD delta has a
  closed form and is positive even for moves from denser to sparser parcels;
* a gridded corridor city (dense corridors of width W along arterials spaced
  L apart, quiet interiors) whose PWD swings by a factor approaching three
  purely with the choice of parcel outlines.

The corridor construction also carries a brute-force raster oracle: the tile
is cut into uniform cells, cells are aggregated into parcels per the chosen
outline, and PWD of the aggregate must match the closed form.  Lengths here
are kilometres (densities stay persons per hectare, hence factors of 100
converting km^2 to ha); everything else in the package sticks to hectares.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .metrics import Parcel, ParcelTable, harmonic_mean, pwd

_REL_TOL = 1e-12


# ---------------------------------------------------------------------------
# Growth on a fixed two-parcel frame
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GrowthSnapshot:
    """One moment of a city with a uniform footprint inside a fixed frame.

    The frame has gross area ``gross_area`` split into two equal parcels by
    a fixed line.  The built-up footprint (area ``urban_area``, population
    ``urban_population``, uniform density) always covers the inner parcel
    completely, so it must occupy more than half the frame; it never exceeds
    the frame.
    """

    gross_area: float
    urban_area: float
    urban_population: float

    def __post_init__(self) -> None:
        if not self.gross_area > 0:
            raise ValueError(f"gross area must be positive, got {self.gross_area}")
        if not self.urban_area > self.gross_area / 2.0:
            raise ValueError(
                "urban area must exceed half the gross area "
                f"(got {self.urban_area} of {self.gross_area})"
            )
        if self.urban_area > self.gross_area * (1.0 + _REL_TOL):
            raise ValueError(
                f"urban area {self.urban_area} exceeds gross area {self.gross_area}"
            )
        if not self.urban_population > 0:
            raise ValueError(
                f"urban population must be positive, got {self.urban_population}"
            )

    @property
    def urban_density(self) -> float:
        """True density of the footprint, persons per hectare."""
        return self.urban_population / self.urban_area

    @property
    def urban_fraction(self) -> float:
        """u = urban_area / gross_area, in (1/2, 1]."""
        return self.urban_area / self.gross_area


def growth_pwd_ratio(urban_fraction: float) -> float:
    """PWD over true urban density as a function of u = urban fraction.

    Equals 1/u + 2u - 2 on [1/2, 1].  The endpoint u = 1/2 is admitted as
    the limit where the outer parcel is empty (value 1); u = 1 is the fully
    built frame (value 1 again).  The minimum 2*(sqrt(2) - 1), about 0.8284,
    sits at u = 1/sqrt(2): a city growing through that range shows a falling
    PWD despite uniform and rising actual density.
    """
    u = float(urban_fraction)
    if u < 0.5 or u > 1.0:
        # absorb pure rounding noise at both ends, reject everything else
        if 0.5 - _REL_TOL <= u < 0.5:
            u = 0.5
        elif 1.0 < u <= 1.0 + _REL_TOL:
            u = 1.0
        else:
            raise ValueError(f"urban fraction must lie in [1/2, 1], got {u}")
    return 1.0 / u + 2.0 * u - 2.0


def growth_two_parcel_table(snapshot: GrowthSnapshot) -> ParcelTable:
    """The two-parcel measurement frame for a snapshot.

    The inner parcel is fully built, so it holds the fraction
    gross_area / (2 * urban_area) of the population; the outer parcel gets
    the remainder (the footprint's spill past the halfway line).
    """
    half = snapshot.gross_area / 2.0
    inner_pop = (snapshot.gross_area / (2.0 * snapshot.urban_area)) * snapshot.urban_population
    outer_pop = max(snapshot.urban_population - inner_pop, 0.0)
    return ParcelTable(
        (Parcel("inner", inner_pop, half), Parcel("outer", outer_pop, half)),
        region_id="growth-frame",
    )


def growth_pwd(snapshot: GrowthSnapshot) -> float:
    """PWD of the snapshot on its two-parcel frame.

    Agrees with growth_pwd_ratio(u) * urban_density to rounding.
    """
    return pwd(growth_two_parcel_table(snapshot))


def growth_decline(u1: float, u2: float, density_growth: float = 1.0) -> float:
    """Signed fractional PWD change between two urban fractions.

    ``density_growth`` is the ratio of true urban densities (second over
    first); 1 means the footprint densifies exactly in step with its spread.
    A negative return is a measured decline.  From the limit u1 = 1/2 to the
    trough u2 = 1/sqrt(2) the decline is 2*sqrt(2) - 3, about -17.2 percent,
    and stays near -8.9 percent even with 10 percent density growth.
    """
    if not density_growth > 0:
        raise ValueError(f"density growth must be positive, got {density_growth}")
    return growth_pwd_ratio(u2) * density_growth / growth_pwd_ratio(u1) - 1.0


# ---------------------------------------------------------------------------
# Boundary perturbation
# ---------------------------------------------------------------------------


def boundary_shift_delta(
    population_1: float,
    area_1: float,
    population_2: float,
    area_2: float,
    total_population: float,
    transferred: float,
) -> float:
    """Exact PWD change when ``transferred`` people move from parcel 2 to 1.

    Closed form: (2p / P0) * (d1 - d2 + p / harmonic_mean(A1, A2)) where d1
    and d2 are the parcel densities before the move.  Only the two affected
    parcels enter; the rest of the region cancels.  The last term is always
    positive, so moving people *into* the denser parcel (d1 >= d2) raises
    PWD strictly for any positive transfer, which is how a mere boundary
    redraw can manufacture a PWD increase.
    """
    if not area_1 > 0 or not area_2 > 0:
        raise ValueError("parcel areas must be positive")
    if not population_1 >= 0 or not population_2 >= 0:
        raise ValueError("parcel populations must be >= 0")
    if not total_population > 0:
        raise ValueError("total population must be positive")
    if total_population < population_1 + population_2:
        raise ValueError(
            "total population cannot be less than the two parcels' combined "
            f"population ({total_population} < {population_1 + population_2})"
        )
    if not 0 <= transferred <= population_2:
        raise ValueError(
            f"transfer must lie in [0, population_2], got {transferred}"
        )
    d1 = population_1 / area_1
    d2 = population_2 / area_2
    return (2.0 * transferred / total_population) * (
        d1 - d2 + transferred / harmonic_mean((area_1, area_2))
    )


# ---------------------------------------------------------------------------
# Corridor grid city
# ---------------------------------------------------------------------------


class CorridorSubdivision(str, Enum):
    """How the corridor city is cut into parcels.

    aligned_a: square parcels of side L/2 with corners on the arterial
    crossings, so every parcel clips the same two half-width corridor strips.
    offset_b: the same squares shifted by L/4 to centre on the arterials,
    splitting each block into one crossroad parcel, two transverse parcels
    and one quiet interior parcel.
    tight_c: parcels that hug the density boundary, an L-shaped corridor
    parcel plus a square interior parcel per block.
    """

    ALIGNED = "aligned_a"
    OFFSET = "offset_b"
    TIGHT = "tight_c"


@dataclass(frozen=True)
class CorridorCityParams:
    """A periodic city: dense corridors on a square arterial grid.

    Corridors of width ``corridor_width_km`` (density ``corridor_density``)
    run along arterials spaced ``block_spacing_km`` apart in both axes; the
    rest sits at ``suburban_density``.  Densities are persons per hectare,
    lengths kilometres.  The width may not exceed half the spacing, so
    corridors never merge.
    """

    suburban_density: float
    corridor_density: float
    corridor_width_km: float
    block_spacing_km: float

    def __post_init__(self) -> None:
        if not self.suburban_density > 0:
            raise ValueError(
                f"suburban density must be positive, got {self.suburban_density}"
            )
        if self.corridor_density < self.suburban_density:
            raise ValueError(
                "corridor density must be at least the suburban density "
                f"({self.corridor_density} < {self.suburban_density})"
            )
        if not self.corridor_width_km > 0:
            raise ValueError(
                f"corridor width must be positive, got {self.corridor_width_km}"
            )
        if not self.block_spacing_km > 0:
            raise ValueError(
                f"block spacing must be positive, got {self.block_spacing_km}"
            )
        if self.corridor_width_km > self.block_spacing_km / 2.0:
            raise ValueError(
                f"corridor width {self.corridor_width_km} exceeds half the "
                f"block spacing {self.block_spacing_km}"
            )


def consolidation_factor(params: CorridorCityParams) -> float:
    """K = (D/d - 1) * (W/L) * (2 - W/L), the corridors' lift over suburbia.

    The city's overall density is suburban_density * (1 + K); K is 0 for a
    uniform city and grows with both the density contrast and the share of
    land the corridors cover.
    """
    w = params.corridor_width_km / params.block_spacing_km
    return (params.corridor_density / params.suburban_density - 1.0) * w * (2.0 - w)


def corridor_pwd_gap(params: CorridorCityParams) -> float:
    """PWD(offset_b) - PWD(aligned_a), in persons per hectare.

    Closed form d * r^2 * w^2 * (2*(1-w)^2 + w^2) / (1 + K) with
    r = D/d - 1 and w = W/L.  A product of squares, so it is nonnegative in
    exact arithmetic and in floating point alike, vanishing only when the
    city is uniform.  Kept as its own function so sweeps never subtract two
    nearly equal PWDs.
    """
    d = params.suburban_density
    w = params.corridor_width_km / params.block_spacing_km
    r = params.corridor_density / d - 1.0
    k = consolidation_factor(params)
    return d * r * r * w * w * (2.0 * (1.0 - w) ** 2 + w * w) / (1.0 + k)


def corridor_pwd(params: CorridorCityParams, subdivision: CorridorSubdivision | str) -> float:
    """PWD of the corridor city under the chosen parcel outline.

    aligned_a gives d * (1 + K), which is exactly the overall density: every
    parcel is identical, so the subdivision sees no variation at all.
    offset_b adds corridor_pwd_gap on top.  tight_c, the density-faithful
    cut, gives d + K/(1+K) * D, the population-weighted mean of the two true
    densities and the ceiling for any outline.
    """
    sub = CorridorSubdivision(subdivision)
    d = params.suburban_density
    k = consolidation_factor(params)
    if sub is CorridorSubdivision.ALIGNED:
        return d * (1.0 + k)
    if sub is CorridorSubdivision.OFFSET:
        return d * (1.0 + k) + corridor_pwd_gap(params)
    return d + k / (1.0 + k) * params.corridor_density


def corridor_parcel_table(
    params: CorridorCityParams, subdivision: CorridorSubdivision | str
) -> ParcelTable:
    """A representative tile of the corridor city as an explicit parcel table.

    For the two square outlines the tile is the 2x2 block of L/2 parcels
    that the pattern repeats (aligned_a: four identical parcels; offset_b:
    interior, crossroad and two transverse parcels).  For tight_c it is one
    L x L block cut into the L-shaped corridor parcel and the interior
    square.  PWD of the returned table equals corridor_pwd for the same
    arguments up to rounding; the table route exists so the closed forms can
    be cross-checked and so callers can feed the tile to any table-level
    tool.
    """
    sub = CorridorSubdivision(subdivision)
    d = params.suburban_density
    big_d = params.corridor_density
    w = params.corridor_width_km
    length = params.block_spacing_km
    square_ha = 25.0 * length * length  # 100 ha/km^2 * (L/2)^2
    base_pop = d * square_ha
    if sub is CorridorSubdivision.ALIGNED:
        # each L/2 square clips two half-width strips overlapping in a corner
        strip_pop = 25.0 * (big_d - d) * w * (2.0 * length - w)
        return ParcelTable(
            tuple(
                Parcel(f"corner_{i}", base_pop + strip_pop, square_ha)
                for i in range(1, 5)
            ),
            region_id="corridor-tile",
        )
    if sub is CorridorSubdivision.OFFSET:
        cross_pop = base_pop + 100.0 * (big_d - d) * w * (length - w)
        transverse_pop = base_pop + 50.0 * (big_d - d) * w * length
        return ParcelTable(
            (
                Parcel("interior", base_pop, square_ha),
                Parcel("crossroad", cross_pop, square_ha),
                Parcel("transverse_ns", transverse_pop, square_ha),
                Parcel("transverse_ew", transverse_pop, square_ha),
            ),
            region_id="corridor-tile",
        )
    corridor_ha = 100.0 * w * (2.0 * length - w)
    interior_ha = 100.0 * (length - w) ** 2
    return ParcelTable(
        (
            Parcel("corridor_L", big_d * corridor_ha, corridor_ha),
            Parcel("interior", d * interior_ha, interior_ha),
        ),
        region_id="corridor-tile",
    )


def _exact_cell_count(length_km: float, cell_km: float, what: str) -> int:
    """Number of cells in ``length_km``, insisting on an exact fit."""
    n = length_km / cell_km
    k = round(n)
    if k < 1 or abs(n - k) > 1e-9 * max(1.0, abs(n)):
        raise ValueError(
            f"cell size {cell_km} km must exactly divide {what} ({length_km} km)"
        )
    return k


def corridor_pwd_raster(
    params: CorridorCityParams,
    subdivision: CorridorSubdivision | str,
    cell_size_km: float,
) -> float:
    """Brute-force PWD of the corridor city from a uniform cell raster.

    Cuts the representative tile into cell_size_km squares, marks each cell
    corridor or suburban by exact integer arithmetic on the cell grid,
    aggregates the cells into parcels per the chosen outline, and returns
    PWD of the aggregate.  The cell size must exactly divide half the
    corridor width and half the block spacing, and for offset_b also a
    quarter of the block spacing (its parcel corners sit at L/4 off the
    arterials); anything else would let cells straddle a density or parcel
    boundary and bias the oracle silently, so it is an error instead.
    """
    sub = CorridorSubdivision(subdivision)
    if not cell_size_km > 0:
        raise ValueError(f"cell size must be positive, got {cell_size_km}")
    half_width = _exact_cell_count(
        params.corridor_width_km / 2.0, cell_size_km, "half the corridor width"
    )
    half_block = _exact_cell_count(
        params.block_spacing_km / 2.0, cell_size_km, "half the block spacing"
    )
    period = 2 * half_block  # cells per arterial spacing
    if sub is CorridorSubdivision.OFFSET:
        start = _exact_cell_count(
            params.block_spacing_km / 4.0, cell_size_km, "a quarter of the block spacing"
        )
    elif sub is CorridorSubdivision.ALIGNED:
        start = 0
    else:
        start = -half_width
    # cell j spans [j, j+1) in cell units on an axis whose arterials sit at
    # multiples of `period`; a cell is corridor when it falls within
    # half_width of an arterial line on either axis
    idx = np.arange(start, start + period)
    offsets = idx % period
    in_strip = (offsets < half_width) | (offsets >= period - half_width)
    corridor_cells = in_strip[:, None] | in_strip[None, :]
    densities = np.where(
        corridor_cells, params.corridor_density, params.suburban_density
    )
    if sub is CorridorSubdivision.TIGHT:
        labels = np.where(corridor_cells, 0, 1)
    else:
        half_index = (idx - start) // half_block  # 0 or 1 along each axis
        labels = half_index[:, None] * 2 + half_index[None, :]
    cell_ha = 100.0 * cell_size_km * cell_size_km
    parcels = []
    for lab in np.unique(labels):
        mask = labels == lab
        parcels.append(
            Parcel(
                f"cells_{lab}",
                float(densities[mask].sum()) * cell_ha,
                float(mask.sum()) * cell_ha,
            )
        )
    return pwd(ParcelTable(tuple(parcels), region_id="corridor-raster"))
