import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zdm import encoder as enc
from zdm.errors import CoverFailure, QuadratureBudgetExceeded
from zdm.shifts import binary_alphabet, full_shift, Subshift

ROT = enc.CircleRotation("sqrt2-1")


@pytest.fixture(scope="module")
def fams():
    return enc.cover_schedule(ROT, 3)


def test_alpha_whitelist_and_decimal():
    assert ROT.alpha == pytest.approx(math.sqrt(2) - 1)
    assert enc.CircleRotation("0.25").alpha == 0.25
    with pytest.raises(ValueError):
        enc.CircleRotation("1.5")


def test_circle_cover_radii():
    f = enc.build_cover_family(ROT, 1, 4, 0.2)
    assert f.r0 == pytest.approx(0.1375) and f.r1 == pytest.approx(0.15)
    assert f.centers.tolist() == [0, 0.25, 0.5, 0.75]


def test_cover_needs_two_centers():
    with pytest.raises(ValueError):
        enc.build_cover_family(ROT, 1, 1, 0.2)


def test_full_shift_cover():
    sys = enc.SymbolicSystem(full_shift(2))
    f = enc.build_cover_family(sys, 1, 2, 0.2)
    assert f.r0 == pytest.approx(0.55) and f.r1 == pytest.approx(0.6)
    symbols = sys.orbit_word[f.centers]
    assert sorted(symbols.tolist()) == [0, 1]


def test_cover_failure_detected():
    class Sparse(enc.CircleRotation):
        def default_centers(self, m):
            return np.zeros(m)

    with pytest.raises(CoverFailure):
        enc.build_cover_family(Sparse("sqrt2-1"), 1, 4, 0.2)


def test_label_examples():
    f = enc.build_cover_family(ROT, 1, 4, 0.2)
    t = (0.15 - f.r0) / (f.r1 - f.r0)
    assert enc.label(ROT, f, t, 0.5) == (1, 1, 0, 1)
    assert enc.label(ROT, f, 0.3, 0.0)[0] == 0


def test_label_boundary_is_excluded():
    f = enc.CoverFamily(ROT, 1, np.array([0.0, 0.5]), 0.25, 0.375)
    # distance exactly r_0 = 0.25 from both centers at t = 0
    with pytest.raises(CoverFailure):
        enc.label(ROT, f, 0.0, 0.25)
    assert enc.label(ROT, f, 0.0, 0.125) == (0, 1)


def test_label_never_all_ones_on_certified_cover(fams):
    xs = np.random.default_rng(0).random(20000)
    for f in fams:
        for t in (0.0, 0.5, 1.0):
            assert not np.any(enc.label_bits(f, t, xs).all(axis=1))


def test_point_mass_at_center_misses_tent(fams):
    mu = enc.AtomicMeasure([fams[0].centers[0]])
    est = enc.psi_estimate(ROT, fams[0], mu, 0.5, enc.BoundaryEstimatorConfig(0.1))
    assert est.value == 0.0 and est.tolerance == 0.0


@pytest.mark.parametrize("t", [0.0, 0.37, 1.0])
def test_sphere_measure_sits_on_boundary(fams, t):
    f = fams[1]
    mu = enc.SphereMeasure(ROT, f.centers[3], f.radius(t))
    vals = [enc.psi_estimate(ROT, f, mu, t, enc.BoundaryEstimatorConfig(d)).value for d in (0.1, 0.01, 0.001)]
    assert all(v == pytest.approx(1.0, abs=1e-9) for v in vals)


def test_lebesgue_estimate_shrinks(fams):
    mu = enc.LebesgueMeasure(ROT, 100_000)
    for f in fams:
        vals = [enc.psi_estimate(ROT, f, mu, 0.4, enc.BoundaryEstimatorConfig(d)) for d in (0.1, 0.05, 0.01)]
        for a, b in zip(vals, vals[1:]):
            assert b.value <= a.value + 2 * max(a.tolerance, b.tolerance)
        assert vals[-1].value < 0.02


def test_orbit_estimate_has_cross_check_tolerance(fams):
    mu = enc.OrbitMeasure(ROT, 0.1, 20_000)
    est = enc.psi_estimate(ROT, fams[0], mu, 0.2, enc.BoundaryEstimatorConfig(0.1))
    grid = enc.psi_estimate(ROT, fams[0], enc.LebesgueMeasure(ROT, 20_000, checked=False), 0.2,
                            enc.BoundaryEstimatorConfig(0.1))
    assert est.tolerance == pytest.approx(abs(est.value - grid.value))


def test_radius_units_are_wider(fams):
    mu = enc.LebesgueMeasure(ROT, 50_000)
    par = enc.psi_estimate(ROT, fams[0], mu, 0.5, enc.BoundaryEstimatorConfig(0.01))
    rad = enc.psi_estimate(ROT, fams[0], mu, 0.5, enc.BoundaryEstimatorConfig(0.01, units="radius"))
    assert rad.value > par.value


def test_quadrature_budget(fams):
    mu = enc.LebesgueMeasure(ROT, 10_000)
    with pytest.raises(QuadratureBudgetExceeded):
        enc.psi_estimate(ROT, fams[2], mu, 0.5, enc.BoundaryEstimatorConfig(0.1, budget=1000))


def test_psi_upper_dominates_pointwise(fams):
    mu = enc.AtomicMeasure(np.random.default_rng(1).random(50))
    cfg = enc.BoundaryEstimatorConfig(0.05)
    for f in fams:
        up = enc.psi_upper(f, mu, 0.2, 0.4, cfg).value
        for t in np.linspace(0.2, 0.4, 15):
            assert enc.psi_estimate(ROT, f, mu, float(t), cfg).value <= up + 1e-12


def test_upper_semicontinuity_surrogate(fams):
    # estimates on a shrinking parameter grid around t never exceed the value at t by more than tolerance
    f = fams[0]
    atom = float(np.mod(f.centers[1] + f.radius(0.3), 1.0))
    mu = enc.MixtureMeasure([enc.AtomicMeasure([atom]), enc.LebesgueMeasure(ROT, 20_000)], [0.5, 0.5])
    cfg = enc.BoundaryEstimatorConfig(0.05)
    at = enc.psi_estimate(ROT, f, mu, 0.3, cfg)
    for h in (1e-1, 1e-2, 1e-3):
        near = max(enc.psi_estimate(ROT, f, mu, 0.3 + s * h, cfg).value for s in (-1, 1))
        assert near <= at.value + at.tolerance + 1e-12


def arc_oracle(fam, t, y):
    """Open-arc membership computed without the distance function."""
    r = fam.radius(t)
    bits = [0 if 0 < (y - (c - r)) % 1.0 < 2 * r else 1 for c in fam.centers]
    return sum(b << i for i, b in enumerate(bits))


def test_array_name_matches_arc_coding(fams):
    name = enc.array_name(ROT, fams, 0.2013, 0.0, 3, 20)
    for k, f in enumerate(fams):
        for j in range(-20, 21):
            y = (j * ROT.alpha) % 1.0
            assert name.cells[k, j + 20] == arc_oracle(f, 0.2013, y)


def test_array_name_single_cell(fams):
    name = enc.array_name(ROT, fams, 0.5, 0.3, 1, 0)
    assert name.cells.shape == (1, 1)
    assert tuple(int(b) for b in name.rows()[0][0]) == enc.label(ROT, fams[0], 0.5, 0.3)


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1))
def test_array_name_equivariance(x, t):
    fams = enc.cover_schedule(ROT, 3)
    a = enc.array_name(ROT, fams, t, x, 3, 6)
    b = enc.array_name(ROT, fams, t, float(ROT.step(x)), 3, 6)
    assert np.array_equal(a.cells[:, 1:], b.cells[:, :-1])


def test_far_points_separate_immediately(fams):
    r = enc.recoverability_check(ROT, fams, 0.5, [0.0, 0.5], 3, 4)
    assert (r.separated, r.level, r.halfwidth) == (True, 1, 0)


def test_orbit_neighbours_separate(fams):
    r = enc.recoverability_check(ROT, fams, 0.5, [0.1, float(ROT.step(0.1))], 3, 16)
    assert r.separated


def test_identical_points_never_separate(fams):
    r = enc.recoverability_check(ROT, fams, 0.5, [0.3, 0.3], 3, 8)
    assert not r.separated and r.level is None


def test_symbolic_system_metric():
    sys = enc.SymbolicSystem(Subshift.sft(binary_alphabet(), ["11"]))
    x = 1000
    assert sys.dist(x, x) == pytest.approx(2.0 ** -(sys.horizon + 1))
    fams = enc.symbolic_schedule(sys, 3)
    assert [f.m for f in fams] == [2, 5, 13]
    name = enc.array_name(sys, fams, 0.5, x, 3, 3)
    shifted = enc.array_name(sys, fams, 0.5, x + 1, 3, 3)
    assert np.array_equal(name.cells[:, 1:], shifted.cells[:, :-1])


def test_boundary_parameters_oracle(fams):
    f = fams[0]
    p = float(f.centers[0] + f.radius(0.25))
    ts = enc.boundary_parameters(f, [p])
    assert np.any(np.isclose(ts, 0.25))
