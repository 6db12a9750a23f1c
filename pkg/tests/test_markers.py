import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zdm.errors import MarkerNotFound
from zdm.markers import find_marker, gap_statistics, verify_marker
from zdm.shifts import Subshift, binary_alphabet, fibonacci, full_shift, thue_morse


def scan_hits(text: bytes, words):
    return [i for i in range(len(text)) if any(text.startswith(w, i) for w in words)]


def brute_certificate(s, W, n, n_cap):
    """Separation and covering by direct substring search over the language."""
    L = len(W[0])
    for row in s.language(L + n - 1):
        if len(scan_hits(row.tobytes(), W)) >= 2:
            return False, None
    longest = 0
    for row in s.language(L + n_cap - 1):
        hits = scan_hits(row.tobytes(), W)
        marks = [i in hits for i in range(n_cap)]
        run = best = 0
        for m in marks:
            run = 0 if m else run + 1
            best = max(best, run)
        longest = max(longest, best)
    return True, (longest + 1 if longest < n_cap else None)


def test_fibonacci_single_symbol_marker():
    cert = verify_marker(fibonacci(), ["1"], 2)
    assert cert.valid and cert.N == 3


def test_fibonacci_marker_too_close_for_n3():
    cert = verify_marker(fibonacci(), ["1"], 3)
    assert not cert.valid
    assert fibonacci().alphabet.decode(cert.witness) == "101"


def test_find_marker_fibonacci_n2_exact():
    m = find_marker(fibonacci(), 2, 8)
    assert m.words() == ["1"] and m.N == 3 and m.N == 2 * m.n - 1


@pytest.mark.parametrize("name", ["fibonacci", "thue-morse"])
@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_found_markers_agree_with_brute_force(name, n):
    s = fibonacci() if name == "fibonacci" else thue_morse()
    m = find_marker(s, n, 4 * n)
    sep, N = brute_certificate(s, list(m.W), n, 4 * n)
    assert sep and N == m.N


def test_full_shift_has_no_marker():
    with pytest.raises(MarkerNotFound) as info:
        find_marker(full_shift(2), 2, 4)
    assert "period" in str(info.value)


def test_rejects_inadmissible_marker_word():
    with pytest.raises(ValueError):
        verify_marker(fibonacci(), ["11"], 2)


def test_uncovered_candidate_reports_witness():
    # in the golden-mean shift the all-zero point never sees "1"
    s = Subshift.sft(binary_alphabet(), ["11"])
    cert = verify_marker(s, ["1"], 2)
    assert cert.valid and not cert.covered
    assert b"\x01" not in cert.witness


def test_gap_statistics_bounds():
    m = find_marker(thue_morse(), 9, 36)
    lo, hi = gap_statistics(m)
    assert m.n <= lo <= hi <= m.N


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 4, 5]), st.sampled_from(["fib", "tm"]))
def test_hits_on_long_words_respect_certificate(seed, n, which):
    s = fibonacci() if which == "fib" else thue_morse()
    m = find_marker(s, n, 4 * n)
    word = s.sample_word(400, np.random.default_rng(seed))
    hits = m.hits(np.frombuffer(word, dtype=np.uint8))
    gaps = np.diff(hits)
    assert hits.size >= 2
    assert gaps.min() >= n
    assert gaps.max() <= m.N
    assert hits[0] < m.N


def test_marker_dict():
    d = find_marker(fibonacci(), 2, 4).to_dict()
    assert d == {"n": 2, "L": 1, "W": ["1"], "N": 3, "certificate_lengths": [2, 3]}
