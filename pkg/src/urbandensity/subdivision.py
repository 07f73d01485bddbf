"""Refinement bookkeeping for parcel subdivisions.

A fine subdivision properly refines a coarse one when every fine parcel
belongs to exactly one coarse parent and each parent's area and population
are exactly the sums over its children.  No geometry is carried here; the
parent mapping plus the two conservation laws are all the structure the
density measures need.

The payoff is a monotonicity law: refining a subdivision can only raise (or
preserve) PWD, never lower it, with equality exactly when every fine parcel
has the same density as its parent.  OD is untouched by refinement, so the
gap between PWD and OD is a resolution-dependent quantity and comparisons
across datasets are only fair at comparable parcel graining.

Conservation is checked to 1e-9 relative; the monotonicity comparison uses
1e-12 relative so a genuinely equal refinement is flagged as equality rather
than drowned by rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .metrics import Parcel, ParcelTable, harmonic_mean, pwd

CONSERVATION_REL_TOL = 1e-9
_PWD_REL_TOL = 1e-12
_DENSITY_REL_TOL = 1e-9


@dataclass(frozen=True)
class RefinementViolation:
    """One broken conservation law at one coarse parcel."""

    coarse_id: str
    kind: str  # "area" or "population"
    magnitude: float  # absolute difference between parent and child sum


@dataclass(frozen=True)
class RefinementMap:
    """A claim that ``fine`` properly refines ``coarse``.

    ``parent_of`` maps every fine parcel id to its coarse parent id.  The
    mapping must be total over the fine table and must target real coarse
    parcels; those are structural errors raised at construction.  Whether
    the conservation laws actually hold is a separate question answered by
    :func:`validate_refinement`, so a map for corrupted data can still be
    built and then reported on.
    """

    fine: ParcelTable
    coarse: ParcelTable
    parent_of: Mapping[str, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "parent_of", dict(self.parent_of))
        fine_ids = {p.id for p in self.fine.parcels}
        mapped = set(self.parent_of)
        missing = fine_ids - mapped
        if missing:
            raise ValueError(f"unmapped fine parcel ids: {sorted(missing)}")
        unknown = mapped - fine_ids
        if unknown:
            raise ValueError(f"parent map names unknown fine parcels: {sorted(unknown)}")
        coarse_ids = {p.id for p in self.coarse.parcels}
        bad = {cid for cid in self.parent_of.values() if cid not in coarse_ids}
        if bad:
            raise ValueError(f"parent map targets unknown coarse parcels: {sorted(bad)}")

    def children_of(self) -> dict[str, list[Parcel]]:
        """Fine parcels grouped by coarse parent id (insertion order kept)."""
        groups: dict[str, list[Parcel]] = {p.id: [] for p in self.coarse.parcels}
        for child in self.fine.parcels:
            groups[self.parent_of[child.id]].append(child)
        return groups


def validate_refinement(
    rmap: RefinementMap, rel_tol: float = CONSERVATION_REL_TOL
) -> list[RefinementViolation]:
    """Check both conservation laws for every coarse parcel.

    Returns one violation record per broken law, empty when the refinement
    is proper.  A coarse parcel with no children at all shows up as plain
    conservation violations (its sums are zero), not as a structural error.
    """
    violations: list[RefinementViolation] = []
    for parent_id, children in rmap.children_of().items():
        parent = rmap.coarse.by_id()[parent_id]
        area_sum = math.fsum(c.area for c in children)
        pop_sum = math.fsum(c.population for c in children)
        for kind, expected, actual in (
            ("area", parent.area, area_sum),
            ("population", parent.population, pop_sum),
        ):
            if abs(actual - expected) > rel_tol * max(abs(expected), abs(actual)):
                violations.append(
                    RefinementViolation(parent_id, kind, abs(actual - expected))
                )
    return violations


def coarsen(
    fine: ParcelTable,
    parent_of: Mapping[str, str],
    region_id: str | None = None,
    label: str | None = None,
) -> ParcelTable:
    """Aggregate a fine table into its parents by summing areas and populations.

    Parent parcels appear in order of first appearance among the fine
    parcels.  The result always validates as a proper refinement of itself
    against ``fine``, since its sums are the definition.
    """
    fine_ids = {p.id for p in fine.parcels}
    missing = fine_ids - set(parent_of)
    if missing:
        raise ValueError(f"unmapped fine parcel ids: {sorted(missing)}")
    groups: dict[str, list[Parcel]] = {}
    for child in fine.parcels:
        groups.setdefault(parent_of[child.id], []).append(child)
    parents = tuple(
        Parcel(
            pid,
            math.fsum(c.population for c in children),
            math.fsum(c.area for c in children),
        )
        for pid, children in groups.items()
    )
    return ParcelTable(
        parents,
        region_id=region_id if region_id is not None else fine.region_id,
        label=label if label is not None else fine.label,
    )


@dataclass(frozen=True)
class MonotonicityCheck:
    """Outcome of comparing PWD across one refinement step.

    ``equality`` means the two PWDs agree to 1e-12 relative, which should
    only happen when every fine parcel matches its parent's density;
    ``density_mismatches`` lists fine parcels that break that implication
    (always empty for honest data).
    """

    pwd_fine: float
    pwd_coarse: float
    holds: bool
    equality: bool
    density_mismatches: tuple[str, ...]


def check_monotonicity(rmap: RefinementMap) -> MonotonicityCheck:
    """Verify that the refinement did not lower PWD.

    Raises if the refinement does not conserve area and population (the
    comparison would be meaningless) or if the region is empty.
    """
    violations = validate_refinement(rmap)
    if violations:
        worst = max(violations, key=lambda v: v.magnitude)
        raise ValueError(
            f"refinement does not conserve {worst.kind} at coarse parcel "
            f"{worst.coarse_id!r} ({len(violations)} violation(s) total)"
        )
    pwd_fine = pwd(rmap.fine)
    pwd_coarse = pwd(rmap.coarse)
    holds = pwd_fine >= pwd_coarse * (1.0 - _PWD_REL_TOL)
    equality = abs(pwd_fine - pwd_coarse) <= _PWD_REL_TOL * pwd_coarse
    mismatches: tuple[str, ...] = ()
    if equality:
        coarse_by_id = rmap.coarse.by_id()
        mismatches = tuple(
            child.id
            for child in rmap.fine.parcels
            if abs(child.density - coarse_by_id[rmap.parent_of[child.id]].density)
            > _DENSITY_REL_TOL * coarse_by_id[rmap.parent_of[child.id]].density
        )
    return MonotonicityCheck(
        pwd_fine=pwd_fine,
        pwd_coarse=pwd_coarse,
        holds=holds,
        equality=equality,
        density_mismatches=mismatches,
    )


def pwd_of_equal_population_subdivision(
    areas: Iterable[float], total_population: float
) -> float:
    """PWD of a table whose N parcels hold equal shares of the population.

    Reduces to ``total_population / (N * harmonic_mean(areas))``, which is
    the route that exposes why uneven parcel areas force PWD above OD.
    """
    if not total_population > 0:
        raise ValueError("total population must be positive")
    vals = list(areas)
    return total_population / (len(vals) * harmonic_mean(vals))


def uniform_refinement(table: ParcelTable, parts: int, id_sep: str = "/") -> RefinementMap:
    """Split every parcel into ``parts`` equal pieces of unchanged density.

    The textbook equality case: PWD of the result matches the original to
    rounding, and check_monotonicity flags it as equality.
    """
    if parts < 1:
        raise ValueError(f"parts must be >= 1, got {parts}")
    children = []
    parent_of: dict[str, str] = {}
    for p in table.parcels:
        for i in range(1, parts + 1):
            cid = f"{p.id}{id_sep}{i}"
            children.append(Parcel(cid, p.population / parts, p.area / parts))
            parent_of[cid] = p.id
    fine = ParcelTable(tuple(children), region_id=table.region_id, label=table.label)
    return RefinementMap(fine=fine, coarse=table, parent_of=parent_of)


def random_refinement(
    coarse: ParcelTable,
    rng: np.random.Generator,
    min_children: int = 1,
    max_children: int = 5,
    preserve_density: bool = False,
    id_sep: str = "/",
) -> RefinementMap:
    """Split each coarse parcel at random, conserving area and population.

    Area shares are drawn uniformly from the simplex (symmetric Dirichlet)
    and population shares from an independent draw, so child densities vary
    freely around the parent's.  Draws that would create an effectively
    zero-area child are rejected and redone.  With ``preserve_density`` the
    population follows the area split and the refinement keeps every density
    equal to its parent's, giving deliberate equality cases.

    Takes an explicit ``rng`` so runs are reproducible under any test
    sharding or parallel sweep.
    """
    if min_children < 1 or max_children < min_children:
        raise ValueError(
            f"bad children range [{min_children}, {max_children}]"
        )
    children = []
    parent_of: dict[str, str] = {}
    for p in coarse.parcels:
        k = int(rng.integers(min_children, max_children + 1))
        if k == 1:
            cid = f"{p.id}{id_sep}1"
            children.append(Parcel(cid, p.population, p.area))
            parent_of[cid] = p.id
            continue
        area_shares = rng.dirichlet(np.ones(k))
        while area_shares.min() < 1e-9:
            area_shares = rng.dirichlet(np.ones(k))
        if preserve_density:
            pop_shares = area_shares
        else:
            pop_shares = rng.dirichlet(np.ones(k))
        for i in range(k):
            cid = f"{p.id}{id_sep}{i + 1}"
            children.append(
                Parcel(cid, p.population * float(pop_shares[i]), p.area * float(area_shares[i]))
            )
            parent_of[cid] = p.id
    fine = ParcelTable(tuple(children), region_id=coarse.region_id, label=coarse.label)
    return RefinementMap(fine=fine, coarse=coarse, parent_of=parent_of)


def compose_refinements(finer: RefinementMap, coarser: RefinementMap) -> RefinementMap:
    """Collapse a two-step refinement chain into one map, fine to coarsest.

    ``finer`` must refine exactly the table that ``coarser`` refines from,
    id for id.
    """
    mid_ids = {p.id for p in finer.coarse.parcels}
    if mid_ids != {p.id for p in coarser.fine.parcels}:
        raise ValueError("chain mismatch: finer.coarse and coarser.fine differ")
    parent_of = {fid: coarser.parent_of[mid] for fid, mid in finer.parent_of.items()}
    return RefinementMap(fine=finer.fine, coarse=coarser.coarse, parent_of=parent_of)
