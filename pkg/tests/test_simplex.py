import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zdm.errors import NotDense, OutsideSimplex
from zdm.simplex import (
    AffineMapOnSimplex,
    FiniteSimplex,
    affinely_independent,
    barycentric,
    decompose,
    prefix_splitter,
    project_to_hull,
    retract,
    singleton_splitter,
    whole_splitter,
)
from zdm.suites import check_retraction, random_simplex

TRI = FiniteSimplex([[0, 0], [1, 0], [0.5, 0.05]])


def test_rejects_dependent_vertices():
    with pytest.raises(ValueError):
        FiniteSimplex([[0, 0], [1, 1], [2, 2]])


def test_centroid_and_vertices():
    assert barycentric(TRI, TRI.vertices.mean(axis=0)) == pytest.approx([1 / 3] * 3)
    for i in range(3):
        assert barycentric(TRI, TRI.vertices[i]) == pytest.approx(np.eye(3)[i])


def test_exterior_point():
    with pytest.raises(OutsideSimplex):
        barycentric(TRI, [2.0, 0.0])


def test_off_hull_point():
    seg = FiniteSimplex([[0, 0, 0], [1, 0, 0]])
    with pytest.raises(OutsideSimplex):
        barycentric(seg, [0.5, 0.1, 0])


@given(st.integers(0, 10**6))
def test_barycentric_reproduces_point(seed):
    rng = np.random.default_rng(seed)
    K = random_simplex(rng)
    w = rng.dirichlet(np.ones(K.size))
    lam = barycentric(K, K.point(w))
    assert lam == pytest.approx(w, abs=1e-7)
    assert lam.min() >= 0 and lam.sum() == pytest.approx(1)


def test_retract_triangle_onto_edge():
    theta = retract(TRI, TRI.face([0, 1]), 0.1)
    assert theta.images[2] == pytest.approx([0.5, 0.0])
    assert theta.vertex_displacement() == pytest.approx(0.05)


def test_retract_onto_whole_is_identity():
    theta = retract(TRI, TRI.whole(), 0.1)
    assert np.array_equal(theta.images, TRI.vertices)


def test_retract_not_dense():
    K = FiniteSimplex([[0, 0], [1, 0], [0.5, 0.2]])
    with pytest.raises(NotDense) as info:
        retract(K, K.face([0, 1]), 0.1)
    assert info.value.vertex == 2 and info.value.gap == pytest.approx(0.2)


def test_projection_onto_vertex_region():
    pts = np.array([[0.0, 0.0], [1.0, 0.0]])
    q, w = project_to_hull(pts, [-1.0, 1.0])
    assert q == pytest.approx([0, 0]) and w == pytest.approx([1, 0])


@given(st.integers(0, 10**6))
def test_projection_beats_random_hull_points(seed):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((int(rng.integers(1, 5)), 4))
    p = rng.standard_normal(4)
    q, w = project_to_hull(pts, p)
    assert w.min() >= -1e-12 and w.sum() == pytest.approx(1)
    assert q == pytest.approx(w @ pts)
    best = np.linalg.norm(p - q)
    for _ in range(50):
        y = rng.dirichlet(np.ones(len(pts))) @ pts
        assert best <= np.linalg.norm(p - y) + 1e-9


@given(st.integers(0, 10**6))
def test_retraction_properties(seed):
    rng = np.random.default_rng(seed)
    K = random_simplex(rng)
    F = K.face(rng.choice(K.size, int(rng.integers(1, K.size + 1)), replace=False))
    gaps = [np.linalg.norm(K.vertices[v] - project_to_hull(F.vertices, K.vertices[v])[0])
            for v in range(K.size) if v not in F.indices]
    eps = max(gaps, default=0.0) + 1e-6
    theta = retract(K, F, eps)
    assert all(check_retraction(K, F, eps, theta, rng).values())


def test_face_composition_and_disjointness():
    K = FiniteSimplex(np.eye(4))
    F = K.face([1, 2, 3])
    G = F.face([0, 2])
    assert G.indices == (1, 3) and G.parent is K
    assert K.face([0]).disjoint_from(K.face([1, 2]))
    assert not K.face([0, 1]).disjoint_from(K.face([1, 2]))


def test_affine_map_injectivity():
    K = FiniteSimplex(np.eye(3))
    assert AffineMapOnSimplex.identity(K).injective()
    assert not AffineMapOnSimplex(K, [[0, 0], [1, 0], [2, 0]]).injective()
    assert affinely_independent(np.zeros((1, 2)))


def test_decompose_examples():
    assert decompose([["a", "b"], ["b", "c"]], singleton_splitter) == [["a", "b"], ["c"]]
    assert decompose([[1, 2], [3, 4]], whole_splitter) == [[1, 2], [3, 4]]
    assert decompose([[1, 2, 3], [2, 3]], singleton_splitter) == [[1, 2, 3]]


def test_prefix_splitter_groups_cylinders():
    out = decompose([["000"], ["001", "010", "011"]], prefix_splitter(2))
    assert out == [["000"], ["001"], ["010", "011"]]


@given(st.lists(st.sets(st.integers(0, 20), min_size=1, max_size=8), min_size=1, max_size=6),
       st.sampled_from(["singleton", "whole"]))
def test_decompose_properties(family, how):
    splitter = singleton_splitter if how == "singleton" else whole_splitter
    fam = [sorted(E) for E in family]
    out = decompose(fam, splitter)
    flat = [p for piece in out for p in piece]
    assert len(flat) == len(set(flat))
    assert set(flat) == set().union(*family)
    assert all(any(set(piece) <= E for E in family) for piece in out)
    assert out[0] == fam[0]
    assert decompose(fam, splitter) == out
