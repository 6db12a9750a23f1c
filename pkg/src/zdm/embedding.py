"""
Marker-aligned row insertion.

A host window gets ``N0`` new rows on top.  Between two consecutive marker
hits ``p`` and ``p + N`` the new rows over columns ``p..p+N-1`` are a copy of
the sample columns ``0..N-1``; every marker restarts the copy at column 0.
The original rows are kept verbatim underneath, which makes the map
injective.

The rightmost segment (after the last hit in the window) is filled as well,
because its content only depends on that hit.  The segment before the first
hit stays ``UNFILLED``.  Density is measured on complete segments only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import GapOutOfRange, NoMarkers, NotGenericEnough, UncoveredPrefix
from .markers import MarkerSet, find_marker, gap_statistics
from .shifts import (
    UNFILLED,
    Alphabet,
    ArraySchema,
    ArrayWindow,
    FrequencyTable,
    Shape,
    Subshift,
    frequency_table,
    stacked_target_table,
)


def _exact(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class NeighborhoodSpec:
    """The weak-star neighborhood of ``target`` cut at shape ``i0`` with radius ``eps``."""

    target: FrequencyTable
    eps: float
    i0: int | None = None

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        i0 = len(self.target.shapes) if self.i0 is None else self.i0
        if not 1 <= i0 <= len(self.target.shapes):
            raise ValueError("i0 outside the target's shape list")
        object.__setattr__(self, "i0", i0)
        shapes = self.shapes
        for (k1, n1), (k2, n2) in zip(shapes, shapes[1:]):
            if k2 < k1 or n2 < n1 or (k1, n1) == (k2, n2):
                raise ValueError(f"shapes must increase: {shapes}")

    @property
    def shapes(self) -> tuple[Shape, ...]:
        return self.target.shapes[: self.i0]

    @property
    def top_shape(self) -> Shape:
        return self.shapes[-1]


def required_block_length(spec: NeighborhoodSpec) -> int:
    """``floor(max(2 n_i0 / eps, k_i0)) + 1``, evaluated in exact arithmetic."""
    k, n = spec.top_shape
    bound = max(Fraction(2 * n) / _exact(spec.eps), Fraction(k))
    return math.floor(bound) + 1


@dataclass(frozen=True, eq=False)
class GenericPointSample:
    schema: ArraySchema
    cells: np.ndarray
    certified_error: float
    worst: tuple = ()

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def cols(self) -> int:
        return self.cells.shape[1]


def _codes(grid: np.ndarray, shape: Shape, radix: int) -> np.ndarray:
    """Integer code of every ``k x n`` placement, indexed ``[row offset, column]``."""
    k, n = shape
    if k * n * math.log2(radix) > 62:
        raise ValueError(f"shape {shape} too large to encode")
    rows, cols = grid.shape
    out = np.zeros((rows - k + 1, cols - n + 1), dtype=np.int64)
    for r in range(k):
        for c in range(n):
            out = out * radix + grid[r:rows - k + 1 + r, c:cols - n + 1 + c]
    return out


def _code_of(pattern, radix: int) -> int:
    code = 0
    for row in pattern:
        for c in row:
            code = code * radix + c
    return code


def prefix_error(cells: np.ndarray, target: FrequencyTable, shapes: Sequence[Shape], radix: int, min_width: int):
    """Largest deviation from ``target`` over prefix rectangles of width ``min_width..cols``.

    Every vertical placement inside the grid is counted.
    """
    rows, cols = cells.shape
    worst = (0.0, None, None, None)
    for shape in shapes:
        k, n = shape
        codes = _codes(cells, shape, radix)
        per_col = rows - k + 1
        widths = np.arange(max(min_width, n), cols + 1)
        placements = per_col * (widths - n + 1)
        patterns = {_code_of(p, radix): float(v) for p, v in target.entries[shape].items()}
        for code in np.unique(codes):
            patterns.setdefault(int(code), 0.0)
        for code, mu in patterns.items():
            hits = np.cumsum((codes == code).sum(axis=0))
            freq = hits[widths - n] / placements
            dev = np.abs(freq - mu)
            j = int(np.argmax(dev))
            if dev[j] > worst[0]:
                worst = (float(dev[j]), shape, code, int(widths[j]))
    return worst


def build_generic_sample(target, N0: int, M: int, spec: NeighborhoodSpec, alphabet: Alphabet | None = None) -> GenericPointSample:
    """Truncated generic point ``x0`` on rows ``1..N0`` and columns ``0..M-1``.

    ``target`` is either a substitution subshift (row ``r`` is its reference
    orbit shifted by ``r``) or an explicit ``N0 x M`` grid of symbol indices.
    """
    if M < N0:
        raise NotGenericEnough(math.inf, spec.eps / 2)
    if isinstance(target, Subshift):
        alphabet = target.alphabet
        orbit = np.frombuffer(target.reference_orbit(M + N0), dtype=np.uint8)
        cells = np.stack([orbit[r:r + M] for r in range(N0)]).astype(np.int16)
    else:
        cells = np.asarray(target, dtype=np.int16)
        if cells.shape != (N0, M):
            raise ValueError(f"explicit sample must be {N0}x{M}, got {cells.shape}")
        if alphabet is None:
            raise ValueError("explicit samples need an alphabet")
    err, shape, code, width = prefix_error(cells, spec.target, spec.shapes, alphabet.size, N0)
    if err > spec.eps / 2:
        raise NotGenericEnough(err, spec.eps / 2)
    schema = ArraySchema((alphabet,) * N0)
    cells.setflags(write=False)
    return GenericPointSample(schema, cells, err, (shape, code, width))


def insert_rows(x: ArrayWindow, marker_hits: Sequence[int], sample: GenericPointSample, N0: int) -> ArrayWindow:
    """Stack ``N0`` new rows copied from ``sample`` between consecutive hits on top of ``x``."""
    hits = [int(h) for h in marker_hits]
    if any(b <= a for a, b in zip(hits, hits[1:])):
        raise ValueError("marker hits must be strictly increasing")
    if N0 != sample.rows:
        raise ValueError("sample row count differs from N0")
    new = np.full((N0, x.cols), UNFILLED, dtype=np.int16)
    for a, b in zip(hits, hits[1:]):
        gap = b - a
        if not N0 <= gap <= sample.cols:
            raise GapOutOfRange(a, gap)
        j = a - x.first_col
        new[:, j:j + gap] = sample.cells[:, :gap]
    if hits:
        j = hits[-1] - x.first_col
        tail = min(x.cols - j, sample.cols)
        new[:, j:j + tail] = sample.cells[:, :tail]
    return ArrayWindow(sample.schema.stacked(x.schema), x.first_col, np.vstack([new, x.cells]))


@dataclass(frozen=True)
class EmbeddingPlan:
    host: Subshift = field(repr=False)
    spec: NeighborhoodSpec = field(repr=False)
    sample: GenericPointSample = field(repr=False)
    marker: MarkerSet
    N0: int
    gaps: tuple[int, int]
    marker_row: int = 0

    def __post_init__(self):
        k, n = self.spec.top_shape
        if not self.N0 > max(2 * n / self.spec.eps, k):
            raise ValueError("N0 too small for the neighborhood")
        if self.gaps[0] < self.N0:
            raise ValueError(f"marker gaps {self.gaps} fall below N0={self.N0}")
        if self.gaps[1] > self.sample.cols:
            raise ValueError("sample narrower than the largest marker gap")

    @property
    def radius(self) -> int:
        """Certified sliding-block radius: output column ``j`` depends on input columns within this distance."""
        return max(self.gaps[1], 2 * self.N0) + self.marker.L

    @property
    def tight_gap_window(self) -> bool:
        return self.gaps[1] <= 2 * self.N0 - 1

    def summary(self) -> dict:
        return {
            "N0": self.N0,
            "eps": self.spec.eps,
            "shapes": [list(s) for s in self.spec.shapes],
            "marker": self.marker.to_dict(),
            "gaps": list(self.gaps),
            "sample_cols": self.sample.cols,
            "certified_sample_error": self.sample.certified_error,
            "radius": self.radius,
        }


def plan_embedding(
    host: Subshift,
    target: Subshift,
    eps: float,
    shapes: Sequence[Shape],
    sample_cols: int | None = None,
    max_L: int | None = None,
    marker_row: int = 0,
) -> EmbeddingPlan:
    """Choose ``N0``, an ``N0``-marker in the host and a certified sample for a substitution target."""
    table = stacked_target_table(target, shapes)
    spec = NeighborhoodSpec(table, eps)
    N0 = required_block_length(spec)
    marker = find_marker(host, N0, max_L if max_L is not None else 4 * N0)
    gaps = gap_statistics(marker)
    M = sample_cols if sample_cols is not None else max(2 * marker.N, 4 * N0)
    sample = build_generic_sample(target, N0, M, spec)
    return EmbeddingPlan(host, spec, sample, marker, N0, gaps, marker_row)


def host_window(plan: EmbeddingPlan, word: bytes, first_col: int = 0) -> ArrayWindow:
    schema = ArraySchema((plan.host.alphabet,))
    return ArrayWindow(schema, first_col, np.frombuffer(word, dtype=np.uint8)[None, :])


def marker_hits(plan: EmbeddingPlan, x: ArrayWindow) -> np.ndarray:
    row = x.cells[plan.marker_row]
    return plan.marker.hits(row) + x.first_col


def build_phi(plan: EmbeddingPlan, x: ArrayWindow) -> ArrayWindow:
    hits = marker_hits(plan, x)
    if hits.size < 2:
        raise NoMarkers(f"{hits.size} marker hit(s) in a window of {x.cols} columns")
    return insert_rows(x, hits, plan.sample, plan.N0)


def filled_span(plan: EmbeddingPlan, y: ArrayWindow) -> tuple[int, int]:
    """Absolute column range ``[first hit, last hit)`` made of complete segments."""
    host = y.rows(plan.N0, y.depth)
    hits = marker_hits(plan, host)
    if hits.size < 2:
        raise NoMarkers("output has fewer than two complete segments")
    return int(hits[0]), int(hits[-1])


@dataclass
class DensityReport:
    inside: bool
    worst_deviation: float
    witness: dict | None
    deviations: dict  # (shape, pattern) -> largest deviation over outputs

    def rows(self):
        for (shape, pattern), dev in sorted(self.deviations.items(), key=lambda kv: (kv[0][0], kv[0][1])):
            yield shape, pattern, dev


def verify_density(plan: EmbeddingPlan, outputs: Sequence[ArrayWindow], strict: bool = False) -> DensityReport:
    """Check every rectangle frequency of the new rows against the target, within ``eps``."""
    target = plan.spec.target
    shapes = plan.spec.shapes
    worst = 0.0
    witness = None
    devs: dict = {}
    modes = ("all", "top") if strict else ("all",)
    for idx, y in enumerate(outputs):
        a, b = filled_span(plan, y)
        block = y.restrict(a, b).rows(0, plan.N0)
        for mode in modes:
            table = frequency_table(block, shapes, vertical=mode)
            for s in shapes:
                for p in set(table.entries[s]) | set(target.entries[s]):
                    d = abs(float(table.get(s, p)) - float(target.get(s, p)))
                    key = (s, p)
                    devs[key] = max(devs.get(key, 0.0), d)
                    if d > worst:
                        worst = d
                        witness = {"output": idx, "shape": list(s), "pattern": [list(r) for r in p], "mode": mode,
                                   "measured": float(table.get(s, p)), "target": float(target.get(s, p))}
    return DensityReport(worst < plan.spec.eps, worst, witness, devs)


def phi_noninvertible(plan: EmbeddingPlan, x: ArrayWindow) -> ArrayWindow:
    """One-sided variant: fill right of the first hit, then move the new rows left by ``2 N0 - 1``.

    The output covers columns ``max(0, p - (2 N0 - 1))`` up to the last column
    whose shifted content is known.
    """
    if x.first_col != 0:
        raise ValueError("one-sided windows start at column 0")
    hits = marker_hits(plan, x)
    if hits.size == 0:
        raise NoMarkers("no marker hit in the one-sided window")
    shift = 2 * plan.N0 - 1
    p = int(hits[0])
    if p > shift:
        raise UncoveredPrefix(f"first marker at column {p} > {shift}")
    y = insert_rows(x, hits, plan.sample, plan.N0)
    stop = x.cols - shift
    start = max(0, p - shift)
    if stop <= start:
        raise ValueError("window too short for the shift")
    new = y.cells[: plan.N0, start + shift: stop + shift]
    old = y.cells[plan.N0:, start:stop]
    return ArrayWindow(y.schema, start, np.vstack([new, old]))
