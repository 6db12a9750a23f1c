import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zdm.errors import EmptyLanguage, ShapeMismatch, ShapeTooLarge
from zdm.shifts import (
    UNFILLED,
    Alphabet,
    ArraySchema,
    ArrayWindow,
    FrequencyTable,
    Subshift,
    binary_alphabet,
    fibonacci,
    frequency_table,
    full_shift,
    measure_distance,
    parse_pattern,
    pattern_rank,
    render_pattern,
    stacked_target_table,
    substitution_frequencies,
    thue_morse,
    unrank_pattern,
)


def brute_sft_language(forbidden, L, pad=6):
    """Words of length L in the middle of some forbidden-free word of length L + 2 pad."""
    out = set()
    for w in itertools.product("01", repeat=L + 2 * pad):
        s = "".join(w)
        if not any(f in s for f in forbidden):
            out.add(s[pad:pad + L])
    return sorted(out)


def factors(word: str, L: int):
    return sorted({word[i:i + L] for i in range(len(word) - L + 1)})


def decoded(s: Subshift, L: int):
    return [s.alphabet.decode(r.tobytes()) for r in s.language(L)]


def test_fibonacci_two_words():
    assert decoded(fibonacci(), 2) == ["00", "01", "10"]


@pytest.mark.parametrize("L", range(1, 9))
def test_substitution_language_matches_long_fixed_point(L):
    for s in (fibonacci(), thue_morse()):
        text = s.alphabet.decode(s.reference_orbit(20000))
        assert decoded(s, L) == factors(text, L)


@pytest.mark.parametrize("forbidden", [["11"], ["00", "111"], ["010"], ["1"]])
@pytest.mark.parametrize("L", [1, 3, 5])
def test_sft_language_matches_brute_force(forbidden, L):
    s = Subshift.sft(binary_alphabet(), forbidden)
    assert decoded(s, L) == brute_sft_language(forbidden, L)


def test_non_extendable_words_are_dropped():
    # "01" can never be followed once "10" and "11" are forbidden, so "01" is not in the language
    s = Subshift.sft(binary_alphabet(), ["10", "11"])
    assert decoded(s, 2) == ["00"]


def test_empty_sft_raises():
    s = Subshift.sft(binary_alphabet(), ["0", "1"])
    with pytest.raises(EmptyLanguage):
        s.language(3)


def test_full_shift_language_size():
    assert full_shift(3).language(4).shape == (81, 4)


def test_language_is_read_only_and_sorted():
    lang = thue_morse().language(6)
    assert not lang.flags.writeable
    rows = [r.tobytes() for r in lang]
    assert rows == sorted(rows)


def test_admissibility():
    s = fibonacci()
    assert s.is_admissible(s.alphabet.encode("01001"))
    assert not s.is_admissible(s.alphabet.encode("11"))


def test_dict_roundtrip():
    s = Subshift.sft(binary_alphabet(), ["11"], name="golden")
    t = Subshift.from_dict(s.to_dict())
    assert decoded(t, 5) == decoded(s, 5)


def test_sample_word_is_admissible():
    rng = np.random.default_rng(3)
    for s in (fibonacci(), Subshift.sft(binary_alphabet(), ["11"])):
        w = s.sample_word(50, rng)
        assert len(w) == 50 and s.is_admissible(w)


def test_fibonacci_letter_frequencies():
    f = substitution_frequencies(fibonacci(), 1)
    golden = (np.sqrt(5) - 1) / 2
    assert f[b"\x00"] == pytest.approx(golden, abs=1e-12)
    assert f[b"\x01"] == pytest.approx(1 - golden, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_perron_frequencies_match_counting(n):
    for s in (fibonacci(), thue_morse()):
        word = s.reference_orbit(200000)[:200000]
        f = substitution_frequencies(s, n)
        counts = {}
        for i in range(len(word) - n + 1):
            counts[word[i:i + n]] = counts.get(word[i:i + n], 0) + 1
        total = len(word) - n + 1
        for w, v in f.items():
            assert counts.get(w, 0) / total == pytest.approx(v, abs=2e-3)


def test_exact_frequency_of_short_word():
    schema = ArraySchema((binary_alphabet(),))
    x = ArrayWindow.from_words(schema, [binary_alphabet().encode("0100101001001")])
    table = frequency_table(x, [(1, 1)])
    assert table.get((1, 1), ((1,),)) == Fraction(5, 13)
    assert table.get((1, 1), ((0,),)) == Fraction(8, 13)


def test_frequency_table_vertical_modes():
    a = binary_alphabet()
    schema = ArraySchema((a, a))
    x = ArrayWindow.from_words(schema, [a.encode("0011"), a.encode("1111")])
    top = frequency_table(x, [(1, 2)], vertical="top")
    assert top.get((1, 2), ((0, 0),)) == Fraction(1, 3)
    both = frequency_table(x, [(1, 2)], vertical="all")
    assert both.get((1, 2), ((1, 1),)) == Fraction(4, 6)


def test_frequency_table_rejects_bad_input():
    schema = ArraySchema((binary_alphabet(),))
    x = ArrayWindow.from_words(schema, [b"\x00\x01"])
    with pytest.raises(ShapeTooLarge):
        frequency_table(x, [(1, 3)])
    cells = np.array([[0, UNFILLED]], dtype=np.int16)
    with pytest.raises(ValueError):
        frequency_table(ArrayWindow(schema, 0, cells), [(1, 1)])


@given(st.lists(st.integers(0, 2), min_size=6, max_size=6))
def test_rank_unrank_roundtrip(cells):
    pattern = (tuple(cells[:3]), tuple(cells[3:]))
    radices = (3, 3)
    r = pattern_rank(radices, pattern)
    assert 0 <= r < 3 ** 6
    assert unrank_pattern(radices, (2, 3), r) == pattern


def test_rank_is_lexicographic():
    radices = (2,)
    pats = [unrank_pattern(radices, (1, 3), r) for r in range(8)]
    assert pats == sorted(pats)


def test_pattern_text_roundtrip():
    a, b = binary_alphabet(), Alphabet(("x", "y", "z"))
    schema = ArraySchema((a, b))
    p = parse_pattern(schema, "01|zx")
    assert p == ((0, 1), (2, 0))
    assert render_pattern(schema, p) == "01|zx"


def _random_table(rng, shapes):
    entries = {}
    for k, n in shapes:
        w = rng.random(2 ** (k * n))
        w /= w.sum()
        entries[(k, n)] = {unrank_pattern((2, 2), (k, n), i): float(v) for i, v in enumerate(w)}
    return FrequencyTable(tuple(shapes), (2, 2), entries)


@given(st.integers(0, 10_000))
def test_distance_is_a_metric(seed):
    rng = np.random.default_rng(seed)
    shapes = [(1, 1), (1, 2), (2, 2)]
    a, b, c = (_random_table(rng, shapes) for _ in range(3))
    assert measure_distance(a, a) == 0
    assert measure_distance(a, b) == pytest.approx(measure_distance(b, a))
    assert measure_distance(a, c) <= measure_distance(a, b) + measure_distance(b, c) + 1e-15
    assert measure_distance(a, b) <= 1


def test_distance_weights_by_canonical_rank():
    base = {(1, 1): {((0,),): 1.0}}
    other = {(1, 1): {((1,),): 1.0}}
    a = FrequencyTable(((1, 1),), (2,), base)
    b = FrequencyTable(((1, 1),), (2,), other)
    # pattern 0 has weight 1/2, pattern 1 weight 1/4
    assert measure_distance(a, b) == pytest.approx(0.75)


def test_distance_shape_mismatch():
    a = FrequencyTable(((1, 1),), (2,), {(1, 1): {((0,),): 1.0}})
    b = FrequencyTable(((1, 2),), (2,), {(1, 2): {((0, 0),): 1.0}})
    with pytest.raises(ShapeMismatch):
        measure_distance(a, b)


def test_stacked_target_table(tmp_path):
    t = stacked_target_table(fibonacci(), [(1, 1), (2, 2)])
    t.validate()
    # a 2x2 stacked pattern is a word of length 3 read at offsets 0 and 1
    assert set(t.entries[(2, 2)]) == {(tuple(w[:2]), tuple(w[1:])) for w in (r.tobytes() for r in fibonacci().language(3))}
    schema = ArraySchema((binary_alphabet(), binary_alphabet()))
    t.to_csv(tmp_path / "f.csv", schema)
    back = FrequencyTable.from_csv(tmp_path / "f.csv", schema)
    assert measure_distance(t, back) == pytest.approx(0, abs=1e-15)


def test_window_shift_and_restrict():
    schema = ArraySchema((binary_alphabet(),))
    x = ArrayWindow.from_words(schema, [b"\x00\x01\x01\x00"], first_col=5)
    assert x.shifted(2).first_col == 3
    r = x.restrict(6, 8)
    assert r.first_col == 6 and r.cells.tolist() == [[1, 1]]
