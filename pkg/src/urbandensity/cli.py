"""Command line front end.

Subcommands: ``compute`` (density report for a parcel CSV), ``verify``
(refinement conservation and PWD monotonicity between two parcel CSVs),
``scenario`` (growth, corridor, and perturbation closed forms), ``sweep``
(corridor metric grids as CSV), ``report`` (longitudinal OD/PWD table).

Exit codes: 0 success, 1 usage or ingestion error, 2 property violation
(broken conservation in ``verify``, raster disagreement in ``scenario
corridor --check-raster``).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .ingest import read_parcels, read_refinement, read_series
from .metrics import density_report
from .report import (
    DEFAULT_DENSITY_RATIO_RANGE,
    DEFAULT_GRID_POINTS,
    DEFAULT_W_OVER_L_RANGE,
    SweepMetric,
    growth_curve,
    longitudinal_report,
    sweep_corridor,
    write_growth_curve_csv,
    write_longitudinal_csv,
    write_sweep_csv,
)
from .scenarios import (
    CorridorCityParams,
    CorridorSubdivision,
    boundary_shift_delta,
    consolidation_factor,
    corridor_pwd,
    corridor_pwd_raster,
    growth_pwd_ratio,
)
from .subdivision import check_monotonicity, validate_refinement

RASTER_REL_TOL = 1e-9

_METRIC_ALIASES = {
    "pct_diff": SweepMetric.PCT_DIFF_B_VS_A,
    "pct_diff_b_vs_a": SweepMetric.PCT_DIFF_B_VS_A,
    "ratio_c": SweepMetric.RATIO_C_OVER_A,
    "ratio_c_over_a": SweepMetric.RATIO_C_OVER_A,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for
    # property violations here
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="urbandensity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser(
        "compute", help="density report for a parcel CSV"
    )
    p_compute.add_argument("--input", required=True, help="parcel CSV path")
    p_compute.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )
    p_compute.set_defaults(func=_cmd_compute)

    p_verify = sub.add_parser(
        "verify", help="check refinement conservation and PWD monotonicity"
    )
    p_verify.add_argument(
        "--fine", required=True, help="fine parcel CSV (needs parent_id column)"
    )
    p_verify.add_argument("--coarse", required=True, help="coarse parcel CSV")
    p_verify.set_defaults(func=_cmd_verify)

    p_scenario = sub.add_parser("scenario", help="closed-form scenario models")
    scen = p_scenario.add_subparsers(dest="scenario", required=True)

    p_growth = scen.add_parser("growth", help="two-parcel growth model")
    p_growth.add_argument(
        "--u", type=float, help="urban fraction in [0.5, 1]; prints pwd / true density"
    )
    p_growth.add_argument("--curve-out", help="write the full curve as CSV here")
    p_growth.add_argument(
        "--points", type=int, default=10001, help="samples for --curve-out"
    )
    p_growth.set_defaults(func=_cmd_growth)

    p_corridor = scen.add_parser("corridor", help="corridor grid city")
    p_corridor.add_argument("--d", type=float, required=True, help="suburban density, persons/ha")
    p_corridor.add_argument("--big-d", type=float, required=True, help="corridor density, persons/ha")
    p_corridor.add_argument("--w", type=float, required=True, help="corridor width, km")
    p_corridor.add_argument("--l", type=float, required=True, help="block spacing, km")
    p_corridor.add_argument(
        "--check-raster", action="store_true", help="cross-check closed forms on a cell raster"
    )
    p_corridor.add_argument(
        "--cell", type=float, default=0.05, help="raster cell size, km (default 0.05)"
    )
    p_corridor.set_defaults(func=_cmd_corridor)

    p_perturb = scen.add_parser("perturb", help="boundary transfer PWD delta")
    p_perturb.add_argument("--p1", type=float, required=True, help="population of receiving parcel")
    p_perturb.add_argument("--a1", type=float, required=True, help="area of receiving parcel, ha")
    p_perturb.add_argument("--p2", type=float, required=True, help="population of giving parcel")
    p_perturb.add_argument("--a2", type=float, required=True, help="area of giving parcel, ha")
    p_perturb.add_argument("--p0", type=float, required=True, help="regional total population")
    p_perturb.add_argument("--p", type=float, required=True, help="people transferred")
    p_perturb.set_defaults(func=_cmd_perturb)

    p_sweep = sub.add_parser("sweep", help="corridor metric over a (W/L, D/d) grid")
    p_sweep.add_argument(
        "--metric",
        required=True,
        choices=sorted(_METRIC_ALIASES),
        help="pct_diff (offset vs aligned) or ratio_c (tight over aligned)",
    )
    p_sweep.add_argument("--out", required=True, help="output CSV path")
    p_sweep.add_argument("--x-min", type=float, default=DEFAULT_W_OVER_L_RANGE[0])
    p_sweep.add_argument("--x-max", type=float, default=DEFAULT_W_OVER_L_RANGE[1])
    p_sweep.add_argument("--y-min", type=float, default=DEFAULT_DENSITY_RATIO_RANGE[0])
    p_sweep.add_argument("--y-max", type=float, default=DEFAULT_DENSITY_RATIO_RANGE[1])
    p_sweep.add_argument("--nx", type=int, default=DEFAULT_GRID_POINTS)
    p_sweep.add_argument("--ny", type=int, default=DEFAULT_GRID_POINTS)
    p_sweep.add_argument("--d-base", type=float, default=15.0)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_report = sub.add_parser("report", help="longitudinal OD/PWD report")
    p_report.add_argument("--series", required=True, help="series CSV path")
    p_report.add_argument("--out", help="output CSV path (default stdout)")
    p_report.set_defaults(func=_cmd_report)

    return parser


def _cmd_compute(args) -> int:
    report = density_report(read_parcels(args.input))
    if args.format == "json":
        print(json.dumps(report.as_dict(), indent=2))
    else:
        writer = csv.writer(sys.stdout)
        data = report.as_dict()
        writer.writerow(data.keys())
        writer.writerow(
            v if isinstance(v, int) else format(v, ".17g") for v in data.values()
        )
    return 0


def _cmd_verify(args) -> int:
    rmap = read_refinement(args.fine, args.coarse)
    violations = validate_refinement(rmap)
    if violations:
        for v in violations:
            print(
                f"violation: coarse parcel {v.coarse_id!r} {v.kind} "
                f"off by {v.magnitude:.17g}"
            )
        return 2
    check = check_monotonicity(rmap)
    print(f"pwd_fine = {check.pwd_fine:.17g}")
    print(f"pwd_coarse = {check.pwd_coarse:.17g}")
    print(f"holds = {str(check.holds).lower()}")
    print(f"equality = {str(check.equality).lower()}")
    if check.density_mismatches:
        print(f"density_mismatches = {','.join(check.density_mismatches)}")
    return 0 if check.holds and not check.density_mismatches else 2


def _cmd_growth(args) -> int:
    if args.curve_out:
        write_growth_curve_csv(growth_curve(args.points), args.curve_out)
        print(f"wrote {args.points} points to {args.curve_out}")
        return 0
    if args.u is None:
        raise ValueError("scenario growth needs --u or --curve-out")
    print(f"pwd_over_density = {growth_pwd_ratio(args.u):.6g}")
    return 0


def _cmd_corridor(args) -> int:
    params = CorridorCityParams(
        suburban_density=args.d,
        corridor_density=args.big_d,
        corridor_width_km=args.w,
        block_spacing_km=args.l,
    )
    print(f"K = {consolidation_factor(params):.6g}")
    values = {}
    for sub in CorridorSubdivision:
        values[sub] = corridor_pwd(params, sub)
        print(f"pwd_{sub.value} = {values[sub]:.6g}")
    if not args.check_raster:
        return 0
    worst = 0.0
    for sub in CorridorSubdivision:
        rastered = corridor_pwd_raster(params, sub, args.cell)
        rel = abs(rastered - values[sub]) / values[sub]
        worst = max(worst, rel)
        print(f"raster_{sub.value} = {rastered:.17g} (rel err {rel:.3g})")
    if worst > RASTER_REL_TOL:
        print(f"raster check FAILED (worst rel err {worst:.3g})")
        return 2
    print("raster check ok")
    return 0


def _cmd_perturb(args) -> int:
    delta = boundary_shift_delta(args.p1, args.a1, args.p2, args.a2, args.p0, args.p)
    print(f"pwd_delta = {delta:.17g}")
    return 0


def _cmd_sweep(args) -> int:
    grid = sweep_corridor(
        _METRIC_ALIASES[args.metric],
        w_over_l_range=(args.x_min, args.x_max),
        density_ratio_range=(args.y_min, args.y_max),
        nx=args.nx,
        ny=args.ny,
        base_density=args.d_base,
    )
    write_sweep_csv(grid, args.out)
    print(f"wrote {grid.cells.size} cells to {args.out}")
    return 0


def _cmd_report(args) -> int:
    rows = longitudinal_report(read_series(args.series))
    if args.out:
        write_longitudinal_csv(rows, args.out)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        write_longitudinal_csv(rows, sys.stdout)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
