"""
Continuous choice of the partition parameter over a finite set of measures.

Parameters live on the middle-thirds Cantor set.  A binary address
``a_1 .. a_l`` names the cylinder ``[lo, lo + 3**-l]`` with
``lo = sum 2 a_i 3**-i``; all cylinder arithmetic is exact.  Measures are
indexed by binary addresses as well, with the ultrametric
``d(i, j) = 2**-(length of common prefix)``.

Stage ``n`` partitions the index set into pieces ``K`` of diameter at most
``2**(1-n)`` and gives each piece one Cantor cylinder ``W`` nested in its
parent's, of diameter at most ``2**(1-n)``, such that the boundary mass
bound on ``K x W`` is at most ``2**(1-n)`` for every level ``k <= n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .encoder import BoundaryEstimatorConfig, CoverFamily, Measure, psi_upper
from .errors import NoSmallPiece


def cantor_interval(address: str) -> tuple[Fraction, Fraction]:
    lo = sum((Fraction(2 * int(a), 3 ** (i + 1)) for i, a in enumerate(address)), Fraction(0))
    return lo, lo + Fraction(1, 3 ** len(address))


def cantor_diameter(address: str) -> Fraction:
    return Fraction(1, 3 ** len(address))


def cantor_depth_for(n: int) -> int:
    """Least depth whose cylinders have diameter at most ``2**(1-n)``."""
    depth = 0
    while Fraction(1, 3 ** depth) > Fraction(2) ** (1 - n):
        depth += 1
    return depth


def index_bits(count: int) -> int:
    return max(1, math.ceil(math.log2(count))) if count > 1 else 0


def index_address(i: int, bits: int) -> str:
    return format(i, f"0{bits}b") if bits else ""


def index_diameter(indices: Sequence[int], bits: int) -> Fraction:
    if len(indices) <= 1:
        return Fraction(0)
    addrs = [index_address(i, bits) for i in indices]
    common = len(addrs[0])
    for a in addrs[1:]:
        common = min(common, next((j for j, (x, y) in enumerate(zip(addrs[0], a)) if x != y), len(a)))
    return Fraction(1, 2 ** common)


@dataclass(frozen=True)
class StagePiece:
    indices: tuple[int, ...]
    address: str  # Cantor cylinder
    parent: int | None  # position in the previous stage
    psi_bounds: tuple[float, ...]  # one per level k = 1..n
    tolerance: float

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        return cantor_interval(self.address)

    def to_dict(self, bits: int) -> dict:
        lo, hi = self.interval
        return {
            "indices": list(self.indices),
            "index_addresses": [index_address(i, bits) for i in self.indices],
            "cantor_address": self.address,
            "interval": [str(lo), str(hi)],
            "parent": self.parent,
            "psi_bounds": list(self.psi_bounds),
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class SelectorTable:
    count: int
    stages: tuple[tuple[StagePiece, ...], ...] = field(repr=False)

    @property
    def n_max(self) -> int:
        return len(self.stages)

    @property
    def bits(self) -> int:
        return index_bits(self.count)

    def piece_of(self, i: int, n: int | None = None) -> StagePiece:
        stage = self.stages[(n or self.n_max) - 1]
        return next(p for p in stage if i in p.indices)

    def limit_address(self, i: int) -> str:
        return self.piece_of(i).address

    def limit_value(self, i: int) -> Fraction:
        """Left endpoint of the final cylinder: a Cantor point within ``2**(1-n_max)`` of ``s``."""
        return self.piece_of(i).interval[0]

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "n_max": self.n_max,
            "stages": [[p.to_dict(self.bits) for p in stage] for stage in self.stages],
            "limits": [
                {"index": i, "address": self.limit_address(i), "value": str(self.limit_value(i))}
                for i in range(self.count)
            ],
        }


def _piece_bound(measures, fams, indices, address, n, cfg) -> tuple[tuple[float, ...], float]:
    lo, hi = cantor_interval(address)
    bounds, tol = [], 0.0
    for k in range(n):
        worst = 0.0
        for i in indices:
            est = psi_upper(fams[k], measures[i], float(lo), min(1.0, float(hi)), cfg)
            worst = max(worst, est.value)
            tol = max(tol, est.tolerance)
        bounds.append(worst)
    return tuple(bounds), tol


def _split(indices: tuple[int, ...], depth: int, bits: int) -> list[tuple[int, ...]]:
    groups: dict[str, list[int]] = {}
    for i in indices:
        groups.setdefault(index_address(i, bits)[:depth], []).append(i)
    return [tuple(g) for _, g in sorted(groups.items())]


def _search_cylinder(measures, fams, indices, parent_addr, n, cfg, extra_depth):
    target = 2.0 ** (1 - n)
    start = max(len(parent_addr), cantor_depth_for(n))
    for depth in range(start, start + extra_depth + 1):
        free = depth - len(parent_addr)
        for code in range(1 << free):
            addr = parent_addr + (format(code, f"0{free}b") if free else "")
            bounds, tol = _piece_bound(measures, fams, indices, addr, n, cfg)
            if max(bounds) <= target + tol:
                return addr, bounds, tol
    return None


def selector_build(
    measures: Sequence[Measure],
    fams: Sequence[CoverFamily],
    n_max: int,
    cfg: BoundaryEstimatorConfig,
    extra_depth: int = 6,
) -> SelectorTable:
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if len(fams) < n_max:
        raise ValueError(f"schedule has {len(fams)} levels, need {n_max}")
    count = len(measures)
    if count == 0:
        raise ValueError("no measures given")
    bits = index_bits(count)
    everyone = tuple(range(count))
    bounds, tol = _piece_bound(measures, fams, everyone, "", 1, cfg)
    stages = [(StagePiece(everyone, "", None, bounds, tol),)]
    for n in range(2, n_max + 1):
        pieces = []
        for j, parent in enumerate(stages[-1]):
            queue = _split(parent.indices, min(n - 1, bits), bits)
            while queue:
                group = queue.pop(0)
                found = _search_cylinder(measures, fams, group, parent.address, n, cfg, extra_depth)
                if found is not None:
                    pieces.append(StagePiece(group, found[0], j, found[1], found[2]))
                elif len(group) > 1:
                    queue[:0] = [(i,) for i in group]
                else:
                    raise NoSmallPiece(n, group[0])
        stages.append(tuple(pieces))
    return SelectorTable(count, tuple(stages))


@dataclass(frozen=True)
class SelectorCheck:
    base: bool
    nesting: bool
    diameters: bool
    smallness: bool
    failures: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.base and self.nesting and self.diameters and self.smallness


def check_selector(table: SelectorTable, measures=None, fams=None, cfg=None) -> SelectorCheck:
    """Verify the four invariants from the table; recompute the bounds too when measures are given."""
    failures = []
    first = table.stages[0]
    base = len(first) == 1 and first[0].indices == tuple(range(table.count)) and first[0].address == ""
    if not base:
        failures.append("stage 1 is not (all indices, full Cantor set)")
    nesting = diameters = smallness = True
    bits = table.bits
    for n, stage in enumerate(table.stages, start=1):
        covered = sorted(i for p in stage for i in p.indices)
        if covered != list(range(table.count)):
            nesting = False
            failures.append(f"stage {n}: pieces do not partition the index set")
        limit = Fraction(2) ** (1 - n)
        for pos, p in enumerate(stage):
            if n > 1:
                par = table.stages[n - 2][p.parent] if p.parent is not None else None
                if par is None or not set(p.indices) <= set(par.indices) or not p.address.startswith(par.address):
                    nesting = False
                    failures.append(f"stage {n} piece {pos}: not nested in its parent")
            if max(index_diameter(p.indices, bits), cantor_diameter(p.address)) > limit:
                diameters = False
                failures.append(f"stage {n} piece {pos}: diameter above {limit}")
            bounds, tol = p.psi_bounds, p.tolerance
            if measures is not None:
                bounds, tol = _piece_bound(measures, fams, p.indices, p.address, n, cfg)
            if len(bounds) != n or any(b < 0 or b > float(limit) + tol for b in bounds):
                smallness = False
                failures.append(f"stage {n} piece {pos}: boundary bound {max(bounds):.4g} above {float(limit)}")
    return SelectorCheck(base, nesting, diameters, smallness, tuple(failures))


def exact_atomic_bad_set(fams: Sequence[CoverFamily], points) -> np.ndarray:
    """Every parameter at which an atom sits on a sphere of some level (the positive-mass set)."""
    from .encoder import boundary_parameters

    return np.unique(np.concatenate([boundary_parameters(f, points) for f in fams]))


def synthetic_measures(system, fams: Sequence[CoverFamily], bad: Sequence[Sequence[tuple[int, float]]], filler: int = 2,
                       seed: int = 0):
    """Atomic measures whose atoms sit on chosen spheres.

    ``bad[j]`` lists ``(level, t)`` pairs; measure ``j`` gets an atom at
    distance ``r_t`` from the first center of that level, plus ``filler``
    atoms drawn at random.  All atoms carry equal weight.
    """
    from .encoder import AtomicMeasure

    rng = np.random.default_rng(seed)
    out = []
    for j, pairs in enumerate(bad):
        pts = [float(np.mod(fams[k - 1].centers[0] + fams[k - 1].radius(t), 1.0)) for k, t in pairs]
        pts.extend(system.random_points(filler, rng).tolist())
        out.append(AtomicMeasure(pts, name=f"synthetic-{j}"))
    return out
