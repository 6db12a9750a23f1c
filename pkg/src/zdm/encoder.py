"""
Array-name encoding of a metric system through a one-parameter family of
ball covers.

At level ``k`` the cover consists of balls of radius ``r_t = r0 + t (r1 - r0)``
around fixed centers.  A point gets the label ``eta`` with ``eta[i] = 0``
exactly when its distance to center ``i`` is strictly below ``r_t``.  The
boundary mass of the induced partition is estimated by integrating tent
functions of the distance to each center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CoverFailure, QuadratureBudgetExceeded
from .shifts import Subshift

ALPHAS = {
    "sqrt2-1": math.sqrt(2) - 1,
    "golden": (math.sqrt(5) - 1) / 2,
    "sqrt3-1": math.sqrt(3) - 1,
    "e-2": math.e - 2,
    "pi-3": math.pi - 3,
}


def parse_alpha(value) -> float:
    if isinstance(value, str) and value in ALPHAS:
        return ALPHAS[value]
    alpha = float(value)
    if not 0 < alpha < 1:
        raise ValueError(f"rotation number {value!r} must lie in (0, 1)")
    return alpha


class CircleRotation:
    """``x -> x + alpha mod 1`` on the circle of length 1 (an isometry)."""

    kind = "circle_rotation"
    lipschitz = 1.0

    def __init__(self, alpha):
        self.alpha_spec = alpha
        self.alpha = parse_alpha(alpha)

    def __repr__(self):
        return f"CircleRotation({self.alpha_spec!r})"

    def step(self, x, j=1):
        return np.mod(np.asarray(x, dtype=float) + np.asarray(j) * self.alpha, 1.0)

    def orbit(self, x: float, halfwidth: int) -> np.ndarray:
        return self.step(x, np.arange(-halfwidth, halfwidth + 1))

    def dist(self, x, y):
        d = np.abs(np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), 1.0))
        return np.minimum(d, 1.0 - d)

    def default_centers(self, m: int) -> np.ndarray:
        return np.arange(m) / m

    def covering_radius(self, m: int) -> float:
        return 1.0 / (2 * m)

    def grid(self, size: int) -> tuple[np.ndarray, float]:
        """Midpoint grid and the distance within which it reaches every point."""
        return (np.arange(size) + 0.5) / size, 0.5 / size

    def random_points(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.random(count)

    def to_dict(self) -> dict:
        return {"type": self.kind, "alpha": self.alpha_spec}


class SymbolicSystem:
    """A subshift with the metric ``2**-n``, ``n`` the first coordinate ``|i|`` of disagreement.

    Points are offsets into a long reference orbit; ``T`` adds one.
    """

    kind = "symbolic"
    lipschitz = 2.0

    def __init__(self, subshift: Subshift, orbit_length: int = 1 << 14, horizon: int = 24, seed: int = 0):
        self.subshift = subshift
        self.horizon = horizon
        self.orbit_word = np.frombuffer(
            subshift.reference_orbit(orbit_length, np.random.default_rng(seed)), dtype=np.uint8
        )[:orbit_length]
        if self.orbit_word.size < orbit_length:
            raise ValueError("reference orbit too short")

    def __repr__(self):
        return f"SymbolicSystem({self.subshift.name!r})"

    def step(self, x, j=1):
        return np.asarray(x) + np.asarray(j)

    def orbit(self, x: int, halfwidth: int) -> np.ndarray:
        return x + np.arange(-halfwidth, halfwidth + 1)

    def _window(self, x) -> np.ndarray:
        x = np.asarray(x)
        h = self.horizon
        if np.any(x - h < 0) or np.any(x + h >= self.orbit_word.size):
            raise IndexError("point too close to the end of the reference orbit")
        return self.orbit_word[x[..., None] + np.arange(-h, h + 1)]

    def dist(self, x, y):
        wx, wy = np.broadcast_arrays(self._window(x), self._window(y))
        h = self.horizon
        order = np.argsort(np.abs(np.arange(-h, h + 1)), kind="stable")
        diff = (wx != wy)[..., order]
        first = np.where(diff.any(axis=-1), np.argmax(diff, axis=-1), 2 * h + 1)
        absidx = np.abs(np.arange(-h, h + 1))[order]
        n = np.where(first <= 2 * h, absidx[np.minimum(first, 2 * h)], h + 1)
        return np.ldexp(1.0, -n)

    def central_words(self, half: int) -> np.ndarray:
        return self.subshift.language(2 * half + 1)

    def default_centers(self, m: int) -> np.ndarray:
        for half in range(self.horizon):
            words = self.central_words(half)
            if words.shape[0] == m:
                return self._representatives(words, half)
            if words.shape[0] > m:
                break
        raise ValueError(f"no cylinder level has exactly {m} central words")

    def _representatives(self, words: np.ndarray, half: int) -> np.ndarray:
        text = self.orbit_word.tobytes()
        reps = []
        for w in words:
            start = self.horizon
            pos = text.find(w.tobytes(), start - half)
            while pos != -1 and pos + half + self.horizon >= len(text):
                pos = -1
            if pos == -1:
                raise ValueError("reference orbit misses a central word")
            reps.append(pos + half)
        return np.array(reps)

    def covering_radius(self, m: int) -> float:
        for half in range(self.horizon):
            if self.central_words(half).shape[0] == m:
                return math.ldexp(1.0, -(half + 1))
        raise ValueError(f"no cylinder level has exactly {m} central words")

    def grid(self, size: int) -> tuple[np.ndarray, float]:
        h = self.horizon
        pts = np.linspace(h, self.orbit_word.size - h - 1, size).astype(np.int64)
        return pts, 0.0

    def random_points(self, count: int, rng: np.random.Generator) -> np.ndarray:
        h = self.horizon + 256
        return rng.integers(h, self.orbit_word.size - h, count)

    def to_dict(self) -> dict:
        return {"type": self.kind, "subshift": self.subshift.to_dict()}


def system_from_dict(spec: dict):
    kind = spec.get("type")
    if kind == CircleRotation.kind:
        return CircleRotation(spec["alpha"])
    if kind in (Subshift.SFT, Subshift.SUBSTITUTION):
        return SymbolicSystem(Subshift.from_dict(spec))
    if kind == SymbolicSystem.kind:
        return SymbolicSystem(Subshift.from_dict(spec["subshift"]))
    raise ValueError(f"unknown system type {kind!r}")


# ---------------------------------------------------------------------------
# covers and labels


@dataclass(frozen=True, eq=False)
class CoverFamily:
    system: object = field(repr=False)
    k: int
    centers: np.ndarray = field(repr=False)
    r0: float
    r1: float

    @property
    def m(self) -> int:
        return len(self.centers)

    def radius(self, t: float) -> float:
        if not 0 <= t <= 1:
            raise ValueError(f"parameter t={t} outside [0, 1]")
        return self.r0 + t * (self.r1 - self.r0)

    def distances(self, x) -> np.ndarray:
        """Distances from each point of ``x`` to every center, shape ``(len(x), m)``."""
        x = np.atleast_1d(np.asarray(x))
        return self.system.dist(x[:, None], self.centers[None, :])


def build_cover_family(sys, k: int, m_k: int, slack: float, grid_size: int = 4096) -> CoverFamily:
    """Equispaced (or cylinder) centers with ``r1 = (1 + slack) c`` and ``r0 = (1 + slack/2) c``."""
    if m_k < 2:
        raise ValueError("a cover needs at least two centers")
    if not 0 < slack < 1:
        raise ValueError("slack must lie in (0, 1)")
    centers = sys.default_centers(m_k)
    cov = sys.covering_radius(m_k)
    fam = CoverFamily(sys, k, centers, cov * (1 + slack / 2), cov * (1 + slack))
    pts, reach = sys.grid(grid_size)
    nearest = fam.distances(pts).min(axis=1)
    worst = float(nearest.max()) + sys.lipschitz * reach
    if not worst < fam.r0:
        raise CoverFailure(f"level {k}: grid point at distance {worst:.4g} >= r0={fam.r0:.4g}")
    return fam


def cover_schedule(sys, levels: int, slack: float = 0.2, first: int = 4, growth: int = 2) -> list[CoverFamily]:
    """Covers for levels ``1..levels`` with ``first * growth**(k-1)`` centers (circle systems)."""
    return [build_cover_family(sys, k, first * growth ** (k - 1), slack) for k in range(1, levels + 1)]


def symbolic_schedule(sys: SymbolicSystem, levels: int, slack: float = 0.2) -> list[CoverFamily]:
    """Covers whose centers represent the central cylinders of length ``2k - 1``."""
    fams = []
    for k in range(1, levels + 1):
        m = sys.central_words(k - 1).shape[0]
        fams.append(build_cover_family(sys, k, m, slack))
    return fams


def label_bits(fam: CoverFamily, t: float, xs) -> np.ndarray:
    """``eta`` for every point of ``xs`` as a 0/1 array of shape ``(len(xs), m)``."""
    eta = (fam.distances(xs) >= fam.radius(t)).astype(np.int8)
    if np.any(eta.all(axis=1)):
        raise CoverFailure(f"level {fam.k}: a point lies outside every ball of radius {fam.radius(t):.4g}")
    return eta


def label(sys, fam: CoverFamily, t: float, x) -> tuple[int, ...]:
    return tuple(int(v) for v in label_bits(fam, t, [x])[0])


def label_codes(fam: CoverFamily, t: float, xs) -> np.ndarray:
    eta = label_bits(fam, t, xs).astype(np.int64)
    return eta @ (1 << np.arange(fam.m, dtype=np.int64))


# ---------------------------------------------------------------------------
# measures and the boundary-mass estimator


class Measure:
    """Quadrature access to a probability measure: weighted nodes plus a tolerance."""

    tolerance_hint = 0.0

    def nodes(self):
        raise NotImplementedError

    def cross_check(self):
        return None


class AtomicMeasure(Measure):
    def __init__(self, points, weights=None, name="atomic"):
        self.points = np.asarray(points)
        w = np.ones(len(self.points)) if weights is None else np.asarray(weights, dtype=float)
        self.weights = w / w.sum()
        self.name = name

    def nodes(self):
        return self.points, self.weights


class LebesgueMeasure(Measure):
    """Midpoint-rule nodes of the Haar measure on the circle."""

    def __init__(self, system: CircleRotation, size: int = 200_000, name="lebesgue", shift: float = 0.0,
                 checked: bool = True):
        self.system = system
        self.size = size
        self.name = name
        self.shift = shift
        self.checked = checked

    def nodes(self):
        pts, _ = self.system.grid(self.size)
        return np.mod(pts + self.shift / self.size, 1.0), np.full(self.size, 1.0 / self.size)

    def cross_check(self):
        # an interleaved grid of a different size; the spread is the tolerance
        if not self.checked:
            return None
        return LebesgueMeasure(self.system, self.size + self.size // 3 + 1, self.name, 0.37, checked=False)


class OrbitMeasure(Measure):
    """Birkhoff averages along the orbit of ``x0``; for the circle the grid rule is the cross-check."""

    def __init__(self, system, x0, length: int = 100_000, name="orbit"):
        self.system = system
        self.x0 = x0
        self.length = length
        self.name = name

    def nodes(self):
        pts = self.system.step(self.x0, np.arange(self.length))
        return pts, np.full(self.length, 1.0 / self.length)

    def cross_check(self):
        if isinstance(self.system, CircleRotation):
            return LebesgueMeasure(self.system, self.length, checked=False)
        return None


class SphereMeasure(AtomicMeasure):
    """Uniform measure on the circle sphere ``{x : d(x, center) = radius}``."""

    def __init__(self, system: CircleRotation, center: float, radius: float, name="sphere"):
        pts = np.mod(np.array([center - radius, center + radius]), 1.0)
        if abs(radius - 0.5) < 1e-15:
            pts = pts[:1]
        super().__init__(pts, name=name)


class MixtureMeasure(Measure):
    def __init__(self, parts: Sequence[Measure], weights: Sequence[float], name="mixture"):
        self.parts = list(parts)
        w = np.asarray(weights, dtype=float)
        self.weights = w / w.sum()
        self.name = name

    def nodes(self):
        pts, ws = [], []
        for part, w in zip(self.parts, self.weights):
            p, q = part.nodes()
            pts.append(np.asarray(p, dtype=float))
            ws.append(w * q)
        return np.concatenate(pts), np.concatenate(ws)

    def cross_check(self):
        checks = [p.cross_check() for p in self.parts]
        if all(c is None for c in checks):
            return None
        return MixtureMeasure([c if c is not None else p for c, p in zip(checks, self.parts)], self.weights)


@dataclass(frozen=True)
class BoundaryEstimatorConfig:
    d: float
    units: str = "parameter"  # or "radius"
    budget: int = 5_000_000

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("tent half-width must be positive")
        if self.units not in ("parameter", "radius"):
            raise ValueError(f"unknown units {self.units!r}")

    def halfwidth(self, fam: CoverFamily) -> float:
        return self.d * (fam.r1 - fam.r0) if self.units == "parameter" else self.d


@dataclass(frozen=True)
class PsiEstimate:
    value: float
    tolerance: float

    def __float__(self):
        return self.value


def tent(dist: np.ndarray, r: float, w: float) -> np.ndarray:
    return np.clip(1.0 - np.abs(dist - r) / w, 0.0, 1.0)


def _tent_integral(fam: CoverFamily, measure: Measure, r: float, w: float, budget: int) -> float:
    pts, weights = measure.nodes()
    if len(pts) * fam.m > budget:
        raise QuadratureBudgetExceeded(f"{len(pts)} nodes x {fam.m} centers exceeds budget {budget}")
    vals = tent(fam.distances(pts), r, w).max(axis=1)
    return float(np.dot(weights, vals))


def psi_estimate(sys, fam: CoverFamily, measure: Measure, t: float, cfg: BoundaryEstimatorConfig) -> PsiEstimate:
    """Quadrature of the tent envelope ``max_i h(dist(x, x_i))`` against the measure.

    The tolerance is the gap to the cross-check quadrature when the measure
    provides one, and 0 for exact (atomic) measures.
    """
    w = cfg.halfwidth(fam)
    r = fam.radius(t)
    value = _tent_integral(fam, measure, r, w, cfg.budget)
    check = measure.cross_check()
    tol = measure.tolerance_hint
    if check is not None:
        tol = max(tol, abs(value - _tent_integral(fam, check, r, w, cfg.budget)))
    return PsiEstimate(value, tol)


def psi_upper(fam: CoverFamily, measure: Measure, t_lo: float, t_hi: float, cfg: BoundaryEstimatorConfig) -> PsiEstimate:
    """Upper bound of the estimate over all ``t`` in ``[t_lo, t_hi]``.

    Each node contributes the supremum of its tent value over the radius
    interval, so the bound dominates the estimate at every ``t`` in the range.
    """
    w = cfg.halfwidth(fam)
    lo, hi = fam.radius(t_lo), fam.radius(t_hi)

    def bound(m: Measure) -> float:
        pts, weights = m.nodes()
        if len(pts) * fam.m > cfg.budget:
            raise QuadratureBudgetExceeded(f"{len(pts)} nodes x {fam.m} centers exceeds budget {cfg.budget}")
        dist = fam.distances(pts)
        gap = np.maximum(0.0, np.maximum(lo - dist, dist - hi))
        return float(np.dot(weights, np.clip(1.0 - gap / w, 0.0, 1.0).max(axis=1)))

    value = bound(measure)
    check = measure.cross_check()
    tol = measure.tolerance_hint
    if check is not None:
        tol = max(tol, abs(value - bound(check)))
    return PsiEstimate(value, tol)


def boundary_parameters(fam: CoverFamily, points) -> np.ndarray:
    """Every ``t`` in ``[0, 1]`` at which some point lies on a sphere of the cover."""
    dist = fam.distances(points).ravel()
    t = (dist - fam.r0) / (fam.r1 - fam.r0)
    return np.unique(t[(t >= 0) & (t <= 1)])


# ---------------------------------------------------------------------------
# array-names


@dataclass(frozen=True, eq=False)
class ArrayName:
    depth: int
    halfwidth: int
    t: float
    cells: np.ndarray  # [level - 1, j + halfwidth] -> packed eta code
    widths: tuple[int, ...]

    def column(self, j: int) -> np.ndarray:
        return self.cells[:, j + self.halfwidth]

    def window(self, depth: int, halfwidth: int) -> np.ndarray:
        c = self.halfwidth
        return self.cells[:depth, c - halfwidth:c + halfwidth + 1]

    def rows(self) -> list[list[str]]:
        out = []
        for m, row in zip(self.widths, self.cells):
            out.append([format(int(v), f"0{m}b")[::-1] for v in row])
        return out

    def to_dict(self) -> dict:
        return {"t": self.t, "depth": self.depth, "halfwidth": self.halfwidth, "rows": self.rows()}


def array_name(sys, fams: Sequence[CoverFamily], t: float, x, depth: int, halfwidth: int) -> ArrayName:
    """Row ``k`` column ``j`` is the level-``k`` label of ``T**j (x)``, ``|j| <= halfwidth``."""
    if depth > len(fams):
        raise ValueError("schedule has fewer levels than the requested depth")
    orbit = sys.orbit(x, halfwidth)
    cells = np.stack([label_codes(fams[k], t, orbit) for k in range(depth)])
    return ArrayName(depth, halfwidth, float(t), cells, tuple(f.m for f in fams[:depth]))


@dataclass(frozen=True)
class Recoverability:
    separated: bool
    level: int | None
    halfwidth: int | None


def recoverability_check(sys, fams, t: float, points, depth: int, halfwidth: int) -> Recoverability:
    """Smallest ``(k, n)`` in lexicographic order at which all points get distinct array-names."""
    names = [array_name(sys, fams, t, x, depth, halfwidth) for x in points]
    for k in range(1, depth + 1):
        for n in range(halfwidth + 1):
            seen = {name.window(k, n).tobytes() for name in names}
            if len(seen) == len(names):
                return Recoverability(True, k, n)
    return Recoverability(False, None, None)
