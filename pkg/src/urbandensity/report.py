"""Grid sweeps, growth curves, and longitudinal density reports.

Everything here reduces the scenario and series machinery to flat CSV files
a plotting tool can consume directly.  The corridor sweeps work in the two
dimensionless coordinates that actually matter, corridor share W/L and
density contrast D/d; the fixed block spacing and base density used to
instantiate each grid point cancel out, and every sweep re-checks that
cancellation at a few cells before returning.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .ingest import LongitudinalSeries
from .metrics import pwd as _pwd
from .scenarios import (
    CorridorCityParams,
    CorridorSubdivision,
    corridor_pwd,
    corridor_pwd_gap,
    growth_pwd_ratio,
)

_FLOAT_FMT = ".17g"

DEFAULT_W_OVER_L_RANGE = (0.01, 0.5)
DEFAULT_DENSITY_RATIO_RANGE = (1.0, 20.0)
DEFAULT_GRID_POINTS = 100


class SweepMetric(str, Enum):
    """What each sweep cell measures.

    pct_diff_b_vs_a: percent PWD excess of the offset_b outline over
    aligned_a, i.e. how much a parcel shift alone moves the figure.
    ratio_c_over_a: PWD under the density-faithful tight_c outline divided
    by aligned_a, the full swing available to an outline choice.
    """

    PCT_DIFF_B_VS_A = "pct_diff_b_vs_a"
    RATIO_C_OVER_A = "ratio_c_over_a"


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """A metric evaluated over a (W/L, D/d) grid.

    ``cells[iy, ix]`` holds the metric at density ratio ``density_ratio[iy]``
    and corridor share ``w_over_l[ix]``.
    """

    metric: SweepMetric
    w_over_l: tuple[float, ...]
    density_ratio: tuple[float, ...]
    cells: np.ndarray

    def __post_init__(self) -> None:
        if self.cells.shape != (len(self.density_ratio), len(self.w_over_l)):
            raise ValueError(
                f"cell grid shape {self.cells.shape} does not match axes "
                f"({len(self.density_ratio)}, {len(self.w_over_l)})"
            )
        if not np.isfinite(self.cells).all():
            raise ValueError("sweep produced non-finite cells")


def _metric_value(
    metric: SweepMetric,
    w_over_l: float,
    density_ratio: float,
    base_density: float,
    block_spacing_km: float,
) -> float:
    params = CorridorCityParams(
        suburban_density=base_density,
        corridor_density=density_ratio * base_density,
        corridor_width_km=w_over_l * block_spacing_km,
        block_spacing_km=block_spacing_km,
    )
    aligned = corridor_pwd(params, CorridorSubdivision.ALIGNED)
    if metric is SweepMetric.PCT_DIFF_B_VS_A:
        return corridor_pwd_gap(params) / aligned * 100.0
    return corridor_pwd(params, CorridorSubdivision.TIGHT) / aligned


def sweep_corridor(
    metric: SweepMetric | str,
    w_over_l_range: tuple[float, float] = DEFAULT_W_OVER_L_RANGE,
    density_ratio_range: tuple[float, float] = DEFAULT_DENSITY_RATIO_RANGE,
    nx: int = DEFAULT_GRID_POINTS,
    ny: int = DEFAULT_GRID_POINTS,
    base_density: float = 15.0,
    block_spacing_km: float = 1.6,
) -> SweepGrid:
    """Evaluate a corridor metric over an inclusive rectangular grid.

    Ranges must stay inside W/L in (0, 1/2] and D/d >= 1.  The metric is
    dimensionless, so ``base_density`` and ``block_spacing_km`` must not
    matter; a self-check re-evaluates a few cells at two other settings and
    raises RuntimeError if they disagree, as that would mean the closed
    forms lost their scale invariance.
    """
    metric = SweepMetric(metric)
    x0, x1 = map(float, w_over_l_range)
    y0, y1 = map(float, density_ratio_range)
    if not 0.0 < x0 <= x1 <= 0.5:
        raise ValueError(f"W/L range must sit inside (0, 0.5], got {w_over_l_range}")
    if not 1.0 <= y0 <= y1:
        raise ValueError(f"density ratio range must sit inside [1, inf), got {density_ratio_range}")
    if nx < 2 or ny < 2:
        raise ValueError(f"grid needs at least 2 points per axis, got {nx}x{ny}")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    cells = np.empty((ny, nx))
    for iy, ratio in enumerate(ys):
        for ix, share in enumerate(xs):
            cells[iy, ix] = _metric_value(
                metric, float(share), float(ratio), base_density, block_spacing_km
            )
    _check_scale_invariance(metric, xs, ys, cells, base_density, block_spacing_km)
    return SweepGrid(
        metric=metric,
        w_over_l=tuple(float(x) for x in xs),
        density_ratio=tuple(float(y) for y in ys),
        cells=cells,
    )


def _check_scale_invariance(
    metric: SweepMetric,
    xs: np.ndarray,
    ys: np.ndarray,
    cells: np.ndarray,
    base_density: float,
    block_spacing_km: float,
) -> None:
    sample = [(0, 0), (len(ys) - 1, len(xs) - 1), (len(ys) // 2, len(xs) // 2)]
    alternates = (
        (base_density * 2.5, block_spacing_km * 0.5),
        (base_density * 0.4, block_spacing_km * 2.0),
    )
    for iy, ix in sample:
        for alt_density, alt_spacing in alternates:
            again = _metric_value(
                metric, float(xs[ix]), float(ys[iy]), alt_density, alt_spacing
            )
            if abs(again - cells[iy, ix]) > 1e-9 * max(abs(again), abs(cells[iy, ix]), 1e-300):
                raise RuntimeError(
                    f"sweep metric {metric.value} depends on base density or "
                    f"block spacing at cell ({xs[ix]}, {ys[iy]}): "
                    f"{cells[iy, ix]} vs {again}"
                )


def _open_for_write(dest):
    if isinstance(dest, (str, os.PathLike)):
        return open(dest, "w", encoding="utf-8", newline=""), True
    return dest, False


def write_sweep_csv(grid: SweepGrid, dest) -> None:
    """Write a sweep as long-format CSV: w_over_l,d_over_d_ratio,value."""
    handle, owned = _open_for_write(dest)
    try:
        writer = csv.writer(handle)
        writer.writerow(["w_over_l", "d_over_d_ratio", "value"])
        for iy, ratio in enumerate(grid.density_ratio):
            for ix, share in enumerate(grid.w_over_l):
                writer.writerow(
                    [
                        format(share, _FLOAT_FMT),
                        format(ratio, _FLOAT_FMT),
                        format(float(grid.cells[iy, ix]), _FLOAT_FMT),
                    ]
                )
    finally:
        if owned:
            handle.close()


def growth_curve(n_points: int = 10001) -> list[tuple[float, float]]:
    """Sample (u, pwd / true density) over u in [1/2, 1], endpoints included.

    Both endpoints evaluate to 1 (the half point as a limit); the trough
    near u = 0.7071 is what longitudinal measurements on a fixed frame run
    into.
    """
    if n_points < 2:
        raise ValueError(f"curve needs at least 2 points, got {n_points}")
    us = np.linspace(0.5, 1.0, n_points)
    return [(float(u), growth_pwd_ratio(float(u))) for u in us]


def write_growth_curve_csv(curve: list[tuple[float, float]], dest) -> None:
    """Write a growth curve as CSV: u,pwd_over_d."""
    handle, owned = _open_for_write(dest)
    try:
        writer = csv.writer(handle)
        writer.writerow(["u", "pwd_over_d"])
        for u, value in curve:
            writer.writerow([format(u, _FLOAT_FMT), format(value, _FLOAT_FMT)])
    finally:
        if owned:
            handle.close()


@dataclass(frozen=True)
class ReportRow:
    """One year of the longitudinal report.

    ``pwd`` is computed when the row carries a full parcel table; otherwise
    the source's reference annotation is shown when present (``pwd_source``
    says which, "computed" or "reference").  Percent changes compare against
    the previous row that had a value.
    """

    year: int
    od: float
    pwd: float | None
    pwd_source: str | None
    od_pct_change: float | None
    pwd_pct_change: float | None


def longitudinal_report(series: LongitudinalSeries) -> list[ReportRow]:
    """OD and PWD per year with percent changes between consecutive rows."""
    out: list[ReportRow] = []
    prev_od: float | None = None
    prev_pwd: float | None = None
    for row in series.rows:
        od = row.overall_density()
        if row.table is not None:
            pwd_value, pwd_source = _pwd(row.table), "computed"
        elif row.pwd_reference is not None:
            pwd_value, pwd_source = row.pwd_reference, "reference"
        else:
            pwd_value, pwd_source = None, None
        od_change = None if prev_od is None else (od / prev_od - 1.0) * 100.0
        pwd_change = (
            None
            if prev_pwd is None or pwd_value is None
            else (pwd_value / prev_pwd - 1.0) * 100.0
        )
        out.append(
            ReportRow(
                year=row.year,
                od=od,
                pwd=pwd_value,
                pwd_source=pwd_source,
                od_pct_change=od_change,
                pwd_pct_change=pwd_change,
            )
        )
        prev_od = od
        if pwd_value is not None:
            prev_pwd = pwd_value
    return out


def write_longitudinal_csv(rows: list[ReportRow], dest) -> None:
    """Write report rows as CSV with empty cells for unavailable values."""
    handle, owned = _open_for_write(dest)
    try:
        writer = csv.writer(handle)
        writer.writerow(["year", "od", "pwd", "od_pct_change", "pwd_pct_change"])
        for row in rows:
            writer.writerow(
                [
                    row.year,
                    format(row.od, _FLOAT_FMT),
                    "" if row.pwd is None else format(row.pwd, _FLOAT_FMT),
                    ""
                    if row.od_pct_change is None
                    else format(row.od_pct_change, _FLOAT_FMT),
                    ""
                    if row.pwd_pct_change is None
                    else format(row.pwd_pct_change, _FLOAT_FMT),
                ]
            )
    finally:
        if owned:
            handle.close()
