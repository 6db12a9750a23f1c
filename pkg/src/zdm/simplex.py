"""
Finite-dimensional simplices: barycentric coordinates, faces, affine maps
given by vertex images, nearest-point retractions onto faces, and the
disjoint decomposition of a finite family of sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import NotDense, OutsideSimplex

TOL = 1e-9


def affinely_independent(points: np.ndarray, tol: float = TOL) -> bool:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] <= 1:
        return True
    diffs = points[1:] - points[0]
    if diffs.shape[0] > diffs.shape[1]:
        return False
    return bool(np.linalg.svd(diffs, compute_uv=False).min() > tol)


def pad(points: np.ndarray, dim: int) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] > dim:
        raise ValueError("cannot pad to a smaller dimension")
    return np.hstack([points, np.zeros((points.shape[0], dim - points.shape[1]))])


@dataclass(frozen=True, eq=False)
class FiniteSimplex:
    vertices: np.ndarray
    labels: tuple[Hashable, ...] = ()

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        object.__setattr__(self, "vertices", v)
        labels = tuple(self.labels) if self.labels else tuple(range(v.shape[0]))
        if len(labels) != v.shape[0]:
            raise ValueError("one label per vertex")
        object.__setattr__(self, "labels", labels)
        if v.shape[0] == 0:
            raise ValueError("a simplex needs at least one vertex")
        if not affinely_independent(v):
            raise ValueError("vertices are not affinely independent")

    @property
    def size(self) -> int:
        return self.vertices.shape[0]

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def face(self, indices: Iterable[int]) -> "Face":
        return Face(self, tuple(indices))

    def whole(self) -> "Face":
        return Face(self, tuple(range(self.size)))

    def point(self, weights) -> np.ndarray:
        return np.asarray(weights, dtype=float) @ self.vertices

    def diameter(self) -> float:
        return float(max((np.linalg.norm(a - b) for a, b in combinations(self.vertices, 2)), default=0.0))

    def to_dict(self) -> dict:
        return {"vertices": self.vertices.tolist(), "labels": list(self.labels)}

    @classmethod
    def from_dict(cls, d: dict) -> "FiniteSimplex":
        return cls(np.array(d["vertices"], dtype=float), tuple(d.get("labels") or ()))


@dataclass(frozen=True, eq=False)
class Face:
    parent: FiniteSimplex = field(repr=False)
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if not idx:
            raise ValueError("a face needs at least one vertex")
        if idx[0] < 0 or idx[-1] >= self.parent.size:
            raise IndexError("face vertex out of range")
        object.__setattr__(self, "indices", idx)

    @property
    def vertices(self) -> np.ndarray:
        return self.parent.vertices[list(self.indices)]

    def face(self, local: Iterable[int]) -> "Face":
        """A face of this face, expressed as a face of the parent."""
        return Face(self.parent, tuple(self.indices[i] for i in local))

    def as_simplex(self) -> FiniteSimplex:
        return FiniteSimplex(self.vertices, tuple(self.parent.labels[i] for i in self.indices))

    def disjoint_from(self, other: "Face") -> bool:
        """Disjoint vertex sets spanning an affinely independent union have disjoint hulls."""
        if set(self.indices) & set(other.indices):
            return False
        return affinely_independent(np.vstack([self.vertices, other.vertices]))


def barycentric(K: FiniteSimplex, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    A = np.vstack([K.vertices.T, np.ones(K.size)])
    b = np.append(p, 1.0)
    lam, *_ = np.linalg.lstsq(A, b, rcond=None)
    residual = float(np.linalg.norm(A @ lam - b))
    if residual > TOL:
        raise OutsideSimplex(f"point is off the affine hull (residual {residual:.3g})")
    if lam.min() < -TOL:
        raise OutsideSimplex(f"barycentric coordinate {lam.min():.3g} is negative")
    lam = np.clip(lam, 0.0, None)
    return lam / lam.sum()


@dataclass(frozen=True, eq=False)
class AffineMapOnSimplex:
    domain: FiniteSimplex = field(repr=False)
    images: np.ndarray

    def __post_init__(self):
        img = np.atleast_2d(np.asarray(self.images, dtype=float))
        if img.shape[0] != self.domain.size:
            raise ValueError("one image per domain vertex")
        object.__setattr__(self, "images", img)

    def __call__(self, p) -> np.ndarray:
        return barycentric(self.domain, p) @ self.images

    def apply_weights(self, weights) -> np.ndarray:
        return np.asarray(weights, dtype=float) @ self.images

    def injective(self) -> bool:
        return affinely_independent(self.images)

    def vertex_displacement(self) -> float:
        """Sup over the simplex of ``|f(x) - x|``; attained at a vertex by convexity."""
        dim = max(self.domain.dim, self.images.shape[1])
        d = pad(self.images, dim) - pad(self.domain.vertices, dim)
        return float(np.linalg.norm(d, axis=1).max())

    def distance_to(self, other: "AffineMapOnSimplex") -> float:
        dim = max(self.images.shape[1], other.images.shape[1])
        return float(np.linalg.norm(pad(self.images, dim) - pad(other.images, dim), axis=1).max())

    @classmethod
    def identity(cls, K: FiniteSimplex) -> "AffineMapOnSimplex":
        return cls(K, K.vertices.copy())


def project_to_hull(points: np.ndarray, p) -> tuple[np.ndarray, np.ndarray]:
    """Nearest point of ``conv(points)`` to ``p`` and convex weights realising it.

    Every affinely independent subset is tried: the projection lies in the
    relative interior of one of them, where it equals the affine projection.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    p = np.asarray(p, dtype=float)
    best, best_w, best_d = None, None, np.inf
    n = points.shape[0]
    for size in range(1, min(n, points.shape[1] + 1) + 1):
        for subset in combinations(range(n), size):
            S = points[list(subset)]
            if not affinely_independent(S):
                continue
            if size == 1:
                lam = np.ones(1)
            else:
                D = (S[1:] - S[0]).T
                mu, *_ = np.linalg.lstsq(D, p - S[0], rcond=None)
                lam = np.concatenate([[1.0 - mu.sum()], mu])
            if lam.min() < -1e-12:
                continue
            q = lam @ S
            dist = float(np.linalg.norm(p - q))
            if dist < best_d - 1e-15:
                best, best_d = q, dist
                best_w = np.zeros(n)
                best_w[list(subset)] = lam
    return best, best_w


def retract(K: FiniteSimplex, F: Face, eps: float) -> AffineMapOnSimplex:
    """Affine retraction of ``K`` onto ``F`` sending each vertex to its nearest point of ``F``."""
    if F.parent is not K:
        raise ValueError("face belongs to a different simplex")
    if not eps > 0:
        raise ValueError("eps must be positive")
    images = K.vertices.copy()
    inside = set(F.indices)
    for v in range(K.size):
        if v in inside:
            continue
        q, _ = project_to_hull(F.vertices, K.vertices[v])
        gap = float(np.linalg.norm(K.vertices[v] - q))
        if gap > eps:
            raise NotDense(v, gap)
        images[v] = q
    return AffineMapOnSimplex(K, images)


# ---------------------------------------------------------------------------
# disjoint decomposition


Splitter = Callable[[list], list[list]]


def singleton_splitter(points: list) -> list[list]:
    return [[p] for p in points]


def whole_splitter(points: list) -> list[list]:
    return [list(points)]


def prefix_splitter(depth: int) -> Splitter:
    """Groups string points (Cantor addresses) by their first ``depth`` symbols."""

    def split(points: list) -> list[list]:
        groups: dict[str, list] = {}
        for p in points:
            groups.setdefault(str(p)[:depth], []).append(p)
        return [groups[k] for k in sorted(groups)]

    return split


SPLITTERS = {"singleton": singleton_splitter, "whole": whole_splitter}


def decompose(E_list: Sequence[Iterable[Hashable]], splitter: Splitter = singleton_splitter) -> list[list]:
    """Pairwise disjoint pieces with the same union, each inside one input set.

    The first set is kept whole; every later set contributes the pieces of its
    difference with the union of its predecessors, in input order.  Empty
    differences contribute nothing.
    """
    out: list[list] = []
    seen: set = set()
    for n, E in enumerate(E_list):
        points = list(dict.fromkeys(E))
        diff = [p for p in points if p not in seen]
        seen.update(points)
        if not diff:
            continue
        pieces = [diff] if n == 0 else [list(piece) for piece in splitter(diff) if piece]
        out.extend(pieces)
    return out
