"""
Stage-by-stage gluing of affine maps on a finite simplex.

The state holds vertex images of ``phi_k`` in an ambient space made of the
simplex coordinates followed by one slab coordinate per stage.  A stage
blends ``phi_k`` towards the identity, grows the processed face ``L`` by
whole vertex groups until it is ``eps``-dense, retracts the remaining
vertices onto it by nearest points, and lifts the newly processed vertices
into the fresh slab of that stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import GroupTooCoarse, PlacementConflict
from .simplex import FiniteSimplex, affinely_independent, pad, project_to_hull

GUARD = 1e-12


@dataclass(frozen=True)
class Schedule:
    """``eps_k`` for ``k >= 1``: geometric ``r**k`` or an explicit finite list."""

    ratio: Fraction | None = None
    values: tuple[Fraction, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        kind, _, arg = text.partition(":")
        if kind == "geometric":
            r = Fraction(arg)
            if not 0 < r < 1:
                raise ValueError("geometric ratio must lie in (0, 1)")
            return cls(ratio=r)
        if kind == "list":
            vals = tuple(Fraction(v) for v in arg.split(","))
            if not vals or any(v <= 0 for v in vals):
                raise ValueError("schedule values must be positive")
            return cls(values=vals)
        raise ValueError(f"unknown schedule {text!r}")

    @property
    def horizon(self) -> int | None:
        return None if self.ratio is not None else len(self.values)

    def eps(self, k: int) -> Fraction:
        if k < 1:
            raise ValueError("stages are numbered from 1")
        if self.ratio is not None:
            return self.ratio ** k
        if k > len(self.values):
            raise ValueError(f"stage {k} beyond the schedule horizon {len(self.values)}")
        return self.values[k - 1]

    def tail(self, k: int) -> Fraction:
        """``sum_{j > k} 4 eps_j``, exact."""
        if self.ratio is not None:
            r = self.ratio
            return 4 * r ** (k + 1) / (1 - r)
        return 4 * sum(self.values[k:], Fraction(0))

    def __str__(self):
        if self.ratio is not None:
            return f"geometric:{self.ratio}"
        return "list:" + ",".join(str(v) for v in self.values)


@dataclass(frozen=True)
class StageCertificate:
    k: int
    eps: float
    alpha: float
    displacement: float
    bound: float
    agreement_exact: bool
    added: tuple[tuple[int, ...], ...]
    group_diameters: tuple[float, ...]
    retraction_gap: float
    injective: bool

    @property
    def ok(self) -> bool:
        return self.displacement + GUARD < self.bound and self.agreement_exact and self.injective

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["added"] = [list(g) for g in self.added]
        d["group_diameters"] = list(self.group_diameters)
        d["ok"] = self.ok
        return d


@dataclass(frozen=True, eq=False)
class GlueState:
    K: FiniteSimplex = field(repr=False)
    groups: tuple[tuple[int, ...], ...]
    schedule: Schedule
    k: int = 0
    n_groups: int = 0  # groups 0..n_groups-1 span L_k
    images: np.ndarray = field(default=None, repr=False)
    history: tuple[StageCertificate, ...] = ()

    def __post_init__(self):
        flat = [v for g in self.groups for v in g]
        if any(not g for g in self.groups):
            raise ValueError("empty vertex group")
        if sorted(flat) != list(range(self.K.size)):
            raise ValueError("groups must partition the vertex indices")
        if self.images is None:
            object.__setattr__(self, "images", self.K.vertices.copy())

    @classmethod
    def start(cls, K: FiniteSimplex, groups: Sequence[Sequence[int]], schedule: Schedule) -> "GlueState":
        return cls(K, tuple(tuple(int(v) for v in g) for g in groups), schedule)

    @property
    def processed(self) -> tuple[int, ...]:
        return tuple(sorted(v for g in self.groups[: self.n_groups] for v in g))

    @property
    def complete(self) -> bool:
        return self.n_groups == len(self.groups)

    def ambient(self, extra: int = 0) -> int:
        return max(self.images.shape[1], self.K.dim) + extra


def _diameter(points: np.ndarray) -> float:
    if points.shape[0] < 2:
        return 0.0
    diff = points[:, None, :] - points[None, :, :]
    return float(np.linalg.norm(diff, axis=-1).max())


def _refine(group: tuple[int, ...], images: np.ndarray, eps: float, subdivide: bool) -> list[tuple[int, ...]]:
    if _diameter(images[list(group)]) < eps:
        return [group]
    if not subdivide or len(group) == 1:
        raise GroupTooCoarse(f"group {list(group)} has image diameter {_diameter(images[list(group)]):.4g} >= {eps}")
    half = len(group) // 2
    return _refine(group[:half], images, eps, subdivide) + _refine(group[half:], images, eps, subdivide)


def glue_step(state: GlueState, subdivide: bool = True) -> GlueState:
    k1 = state.k + 1
    eps_exact = state.schedule.eps(k1)
    eps = float(eps_exact)
    if state.complete:
        cert = StageCertificate(k1, eps, 0.0, 0.0, 4 * eps, True, (), (), 0.0, affinely_independent(state.images))
        return replace(state, k=k1, history=state.history + (cert,))

    dim = state.ambient(1)
    slab = dim - 1
    phi = pad(state.images, dim)
    ident = pad(state.K.vertices, dim)
    spread = _diameter(np.vstack([ident, phi]))
    alpha = eps / (spread + 1.0)
    blended = (1.0 - alpha) * phi + alpha * ident

    # split the pending groups finely enough, then take groups until L is eps-dense
    groups = list(state.groups[: state.n_groups])
    for g in state.groups[state.n_groups:]:
        groups.extend(_refine(g, blended, eps, subdivide))
    n_new = state.n_groups
    while True:
        n_new += 1
        L = sorted(v for g in groups[:n_new] for v in g)
        rest = [v for v in range(state.K.size) if v not in set(L)]
        proj = {v: project_to_hull(blended[L], blended[v]) for v in rest}
        gap = max((float(np.linalg.norm(blended[v] - q)) for v, (q, _) in proj.items()), default=0.0)
        if gap < eps or n_new == len(groups):
            break

    old = set(state.processed)
    new_vertices = [v for v in L if v not in old]
    delta = eps / 2
    images = np.empty_like(phi)
    for v in old:
        images[v] = phi[v]
    for v in new_vertices:
        images[v] = blended[v]
        images[v, slab] += delta
    for v, (_, w) in proj.items():
        images[v] = w @ images[L]

    # the fresh slab must be untouched by K and all earlier images
    if np.any(ident[:, slab] != 0) or any(phi[v, slab] != 0 for v in range(state.K.size)):
        raise PlacementConflict(f"slab coordinate {slab} already in use")
    for v in new_vertices:
        if any(np.array_equal(images[v], images[u]) for u in L if u != v):
            raise PlacementConflict(f"vertex {v} collides with another processed image")

    disp = float(np.linalg.norm(images - phi, axis=1).max())
    agreement = all(np.array_equal(images[v], phi[v]) for v in old)
    added = tuple(groups[state.n_groups:n_new])
    cert = StageCertificate(
        k=k1,
        eps=eps,
        alpha=alpha,
        displacement=disp,
        bound=float(4 * eps_exact),
        agreement_exact=agreement,
        added=added,
        group_diameters=tuple(_diameter(blended[list(g)]) for g in added),
        retraction_gap=gap,
        injective=affinely_independent(images[L]),
    )
    return GlueState(state.K, tuple(groups), state.schedule, k1, n_new, images, state.history + (cert,))


@dataclass(frozen=True, eq=False)
class GlueResult:
    state: GlueState = field(repr=False)
    stages: tuple[StageCertificate, ...]
    tail_bound: Fraction
    injective: bool
    labels_preserved: bool

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.stages) and self.injective and self.labels_preserved

    @property
    def images(self) -> np.ndarray:
        return self.state.images

    def to_dict(self) -> dict:
        return {
            "stages": [c.to_dict() for c in self.stages],
            "tail_bound": str(self.tail_bound),
            "tail_bound_float": float(self.tail_bound),
            "injective": self.injective,
            "labels_preserved": self.labels_preserved,
            "processed": list(self.state.processed),
            "images": self.state.images.tolist(),
            "ok": self.ok,
        }


def glue_run(state: GlueState, stages: int, subdivide: bool = True) -> GlueResult:
    horizon = state.schedule.horizon
    if horizon is not None and state.k + stages > horizon:
        raise ValueError(f"{stages} stages exceed the schedule horizon {horizon}")
    for _ in range(stages):
        state = glue_step(state, subdivide)
    done = list(state.processed)
    imgs = state.images[done]
    distinct = len({row.tobytes() for row in imgs}) == len(done)
    injective = distinct and affinely_independent(imgs)
    # each processed image carries the label of the vertex it came from
    labels = {state.images[v].tobytes(): state.K.labels[v] for v in done}
    preserved = all(labels[state.images[v].tobytes()] == state.K.labels[v] for v in done) and distinct
    return GlueResult(state, state.history, state.schedule.tail(state.k), injective, preserved)
