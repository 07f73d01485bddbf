"""Parcel-based urban density metrics and their failure modes.

Overall density treats a region as one lump; population-weighted density
asks at what density the average resident actually lives.  This package
computes both (plus the density-weighted population view and the gradient
index tying them together), checks the refinement monotonicity law that
makes PWD comparable across datasets, and ships the closed-form scenarios
where boundary and subdivision choices move the measured figures on their
own.
"""

from .metrics import (
    DensityReport,
    GapBound,
    Parcel,
    ParcelTable,
    density_report,
    dwp,
    harmonic_mean,
    overall_density,
    pwd,
    pwd_gap_bound,
    weighted_arithmetic_mean,
    weighted_harmonic_mean,
)
from .subdivision import (
    MonotonicityCheck,
    RefinementMap,
    RefinementViolation,
    check_monotonicity,
    coarsen,
    compose_refinements,
    pwd_of_equal_population_subdivision,
    random_refinement,
    uniform_refinement,
    validate_refinement,
)
from .scenarios import (
    CorridorCityParams,
    CorridorSubdivision,
    GrowthSnapshot,
    boundary_shift_delta,
    consolidation_factor,
    corridor_parcel_table,
    corridor_pwd,
    corridor_pwd_gap,
    corridor_pwd_raster,
    growth_decline,
    growth_pwd,
    growth_pwd_ratio,
    growth_two_parcel_table,
)
from .ingest import (
    LongitudinalSeries,
    SeriesRow,
    load_reference_series,
    read_parcels,
    read_refinement,
    read_series,
    reference_series_names,
    write_parcels,
)
from .report import (
    ReportRow,
    SweepGrid,
    SweepMetric,
    growth_curve,
    longitudinal_report,
    sweep_corridor,
    write_growth_curve_csv,
    write_longitudinal_csv,
    write_sweep_csv,
)

__version__ = "0.1.0"

__all__ = [
    "Parcel",
    "ParcelTable",
    "DensityReport",
    "GapBound",
    "overall_density",
    "pwd",
    "dwp",
    "density_report",
    "harmonic_mean",
    "weighted_harmonic_mean",
    "weighted_arithmetic_mean",
    "pwd_gap_bound",
    "RefinementMap",
    "RefinementViolation",
    "MonotonicityCheck",
    "validate_refinement",
    "coarsen",
    "check_monotonicity",
    "pwd_of_equal_population_subdivision",
    "uniform_refinement",
    "random_refinement",
    "compose_refinements",
    "GrowthSnapshot",
    "growth_pwd_ratio",
    "growth_pwd",
    "growth_two_parcel_table",
    "growth_decline",
    "boundary_shift_delta",
    "CorridorCityParams",
    "CorridorSubdivision",
    "consolidation_factor",
    "corridor_pwd",
    "corridor_pwd_gap",
    "corridor_parcel_table",
    "corridor_pwd_raster",
    "LongitudinalSeries",
    "SeriesRow",
    "read_parcels",
    "read_refinement",
    "read_series",
    "write_parcels",
    "load_reference_series",
    "reference_series_names",
    "SweepGrid",
    "SweepMetric",
    "ReportRow",
    "sweep_corridor",
    "growth_curve",
    "longitudinal_report",
    "write_sweep_csv",
    "write_growth_curve_csv",
    "write_longitudinal_csv",
]
