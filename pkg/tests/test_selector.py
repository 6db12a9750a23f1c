from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zdm import encoder as enc
from zdm.errors import NoSmallPiece
from zdm.selector import (
    SelectorTable,
    cantor_depth_for,
    cantor_interval,
    check_selector,
    exact_atomic_bad_set,
    index_diameter,
    selector_build,
    synthetic_measures,
)

ROT = enc.CircleRotation("sqrt2-1")


@pytest.fixture(scope="module")
def fams():
    return enc.cover_schedule(ROT, 6)


def test_cantor_cylinders_are_exact():
    assert cantor_interval("") == (0, 1)
    assert cantor_interval("1") == (Fraction(2, 3), 1)
    assert cantor_interval("01") == (Fraction(2, 9), Fraction(1, 3))


@given(st.text("01", max_size=8), st.text("01", max_size=4))
def test_cantor_nesting(a, b):
    lo, hi = cantor_interval(a)
    lo2, hi2 = cantor_interval(a + b)
    assert lo <= lo2 < hi2 <= hi


def test_required_depths():
    assert [cantor_depth_for(n) for n in range(1, 7)] == [0, 1, 2, 2, 3, 4]
    for n in range(1, 12):
        assert Fraction(1, 3 ** cantor_depth_for(n)) <= Fraction(2) ** (1 - n)


def test_index_diameter():
    assert index_diameter([0, 1, 2, 3], 2) == 1
    assert index_diameter([2, 3], 2) == Fraction(1, 2)
    assert index_diameter([3], 2) == 0


def test_single_stage_is_trivial(fams):
    t = selector_build([enc.AtomicMeasure([0.1])], fams, 1, enc.BoundaryEstimatorConfig(0.01))
    assert t.n_max == 1
    assert t.stages[0][0].indices == (0,) and t.stages[0][0].address == ""
    assert check_selector(t).ok


def test_lebesgue_takes_leftmost_cylinders(fams):
    t = selector_build([enc.LebesgueMeasure(ROT, 20_000)], fams, 4, enc.BoundaryEstimatorConfig(0.1))
    assert check_selector(t).ok
    for n, stage in enumerate(t.stages, 1):
        assert stage[0].address == "0" * cantor_depth_for(n)


def test_two_measures_avoid_their_bad_sets(fams):
    ms = synthetic_measures(ROT, fams, [[(3, 0.0)], [(3, 2 / 9)]], filler=0)
    cfg = enc.BoundaryEstimatorConfig(0.01)
    t = selector_build(ms, fams, 6, cfg)
    assert check_selector(t, ms, fams, cfg).ok
    for i, mu in enumerate(ms):
        lo, hi = (float(v) for v in t.piece_of(i).interval)
        bad = exact_atomic_bad_set(fams, mu.points)
        assert bad.size and not np.any((bad >= lo) & (bad <= hi))
        assert t.limit_value(i) == t.piece_of(i).interval[0]


def test_checker_catches_broken_tables(fams):
    ms = synthetic_measures(ROT, fams, [[(2, 0.0)], [(2, 2 / 3)]], filler=1)
    t = selector_build(ms, fams, 4, enc.BoundaryEstimatorConfig(0.01))
    stages = list(t.stages)
    bad_piece = replace(stages[3][0], address="1" + stages[3][0].address[1:])
    broken = SelectorTable(t.count, tuple(stages[:3]) + ((bad_piece,) + stages[3][1:],))
    assert not check_selector(broken).nesting
    fat = replace(stages[3][0], address=stages[2][0].address[:1])
    broken = SelectorTable(t.count, tuple(stages[:3]) + ((fat,) + stages[3][1:],))
    res = check_selector(broken)
    assert not res.diameters and not res.nesting
    loud = replace(stages[3][0], psi_bounds=(0.0, 0.0, 0.0, 0.9))
    broken = SelectorTable(t.count, tuple(stages[:3]) + ((loud,) + stages[3][1:],))
    assert not check_selector(broken).smallness


def test_no_small_piece_is_reported(fams):
    # a tent wider than the whole parameter range keeps a heavy atom visible everywhere
    ms = synthetic_measures(ROT, fams, [[(2, 0.5)]], filler=0)
    with pytest.raises(NoSmallPiece) as info:
        selector_build(ms, fams, 3, enc.BoundaryEstimatorConfig(5.0))
    # the atom carries all the mass, so the 1/2 bound of stage 2 is already out of reach
    assert info.value.stage == 2 and info.value.piece == 0


def test_table_serialises(fams):
    ms = synthetic_measures(ROT, fams, [[(1, 0.0)], [(2, 0.0)], [(3, 0.0)]], filler=1)
    t = selector_build(ms, fams, 3, enc.BoundaryEstimatorConfig(0.01))
    d = t.to_dict()
    assert d["n_max"] == 3 and len(d["limits"]) == 3
