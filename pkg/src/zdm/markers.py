"""
n-markers in subshifts, certified by exhaustive language enumeration.

A marker is a finite set ``W`` of admissible words of a common length ``L``;
the clopen set ``F`` is the union of the cylinders ``[w]``.  Separation is
checked on every admissible word of length ``L + n - 1`` and the covering
bound on every admissible word of length ``L + n_cap - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import MarkerNotFound
from .shifts import Subshift


def _as_void(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.uint8)
    return arr.view(np.dtype((np.void, arr.shape[-1])))[..., 0]


def occurrence_mask(words: np.ndarray, marker_words: np.ndarray) -> np.ndarray:
    """``mask[i, j]`` is True when a marker word starts at offset ``j`` of ``words[i]``."""
    L = marker_words.shape[1]
    if words.shape[1] < L:
        return np.zeros((words.shape[0], 0), dtype=bool)
    windows = sliding_window_view(words, L, axis=1)
    return np.isin(_as_void(windows), _as_void(marker_words))


def _longest_false_run(mask: np.ndarray) -> int:
    best = 0
    run = np.zeros(mask.shape[0], dtype=np.int64)
    for j in range(mask.shape[1]):
        run = np.where(mask[:, j], 0, run + 1)
        best = max(best, int(run.max(initial=0)))
    return best


def _word_array(words: Iterable[bytes], L: int) -> np.ndarray:
    words = sorted(set(words))
    return np.frombuffer(b"".join(words), dtype=np.uint8).reshape(len(words), L)


@dataclass(frozen=True)
class MarkerCertificate:
    valid: bool
    N: int | None
    witness: bytes | None
    n_cap: int
    separation_length: int
    covering_length: int | None = None

    @property
    def covered(self) -> bool:
        return self.N is not None


@dataclass(frozen=True)
class MarkerSet:
    subshift: Subshift = field(repr=False)
    n: int
    L: int
    W: tuple[bytes, ...]
    N: int
    certificate: MarkerCertificate = field(repr=False)

    @property
    def certificate_lengths(self) -> tuple[int, int]:
        return (self.L + self.n - 1, self.L + self.N - 1)

    def words(self) -> list[str]:
        return [self.subshift.alphabet.decode(w) for w in self.W]

    def word_array(self) -> np.ndarray:
        return _word_array(self.W, self.L)

    def hits(self, row: np.ndarray) -> np.ndarray:
        """Offsets ``j`` of a symbol row where a marker word starts."""
        row = np.asarray(row)
        if row.size < self.L:
            return np.zeros(0, dtype=np.int64)
        mask = occurrence_mask(row[None, :].astype(np.uint8), self.word_array())[0]
        return np.flatnonzero(mask)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "L": self.L,
            "W": self.words(),
            "N": self.N,
            "certificate_lengths": list(self.certificate_lengths),
        }


def verify_marker(s: Subshift, W: Iterable[str | bytes], n: int, n_cap: int | None = None) -> MarkerCertificate:
    """Check separation and compute the minimal covering bound of a candidate marker."""
    if n < 1:
        raise ValueError("n must be positive")
    words = [s.alphabet.encode(w) if isinstance(w, str) else bytes(w) for w in W]
    if not words:
        raise ValueError("a marker needs at least one word")
    L = len(words[0])
    if any(len(w) != L for w in words):
        raise ValueError("marker words must share one length")
    lang_L = s.language_set(L)
    bad = [w for w in words if w not in lang_L]
    if bad:
        raise ValueError(f"inadmissible marker words: {[s.alphabet.decode(w) for w in bad]}")
    n_cap = 4 * n if n_cap is None else n_cap
    marker = _word_array(words, L)

    sep_len = L + n - 1
    lang = s.language(sep_len)
    mask = occurrence_mask(lang, marker)
    clash = np.flatnonzero(mask.sum(axis=1) >= 2)
    if clash.size:
        return MarkerCertificate(False, None, lang[clash[0]].tobytes(), n_cap, sep_len)

    cov_len = L + n_cap - 1
    lang = s.language(cov_len)
    mask = occurrence_mask(lang, marker)
    run = _longest_false_run(mask)
    if run >= n_cap:
        empty = np.flatnonzero(~mask.any(axis=1))
        return MarkerCertificate(True, None, lang[empty[0]].tobytes(), n_cap, sep_len, cov_len)
    return MarkerCertificate(True, run + 1, None, n_cap, sep_len, cov_len)


def _greedy_separated(s: Subshift, L: int, n: int) -> list[int]:
    """Indices into ``s.language(L)`` chosen greedily in lexicographic order."""
    base = s.language(L)
    if n == 1:
        return list(range(base.shape[0]))
    long = s.language(L + n - 1)
    windows = _as_void(sliding_window_view(long, L, axis=1))
    idx = np.searchsorted(_as_void(base), windows)
    chosen_count = np.zeros(long.shape[0], dtype=np.int64)
    chosen = []
    for c in range(base.shape[0]):
        occ = (idx == c).sum(axis=1)
        rows = occ > 0
        if np.any(occ[rows] > 1) or np.any(chosen_count[rows] > 0):
            continue
        chosen.append(c)
        chosen_count += occ
    return chosen


def find_marker(s: Subshift, n: int, max_L: int, n_cap: int | None = None) -> MarkerSet:
    """Search ``L = 1..max_L`` for a greedily grown lexicographic marker with finite covering bound."""
    if n < 1:
        raise ValueError("n must be positive")
    n_cap = 4 * n if n_cap is None else n_cap
    for L in range(1, max_L + 1):
        base = s.language(L)
        picks = _greedy_separated(s, L, n)
        if not picks:
            continue
        W = tuple(base[i].tobytes() for i in picks)
        cert = verify_marker(s, W, n, n_cap)
        if cert.valid and cert.covered:
            return MarkerSet(s, n, L, W, cert.N, cert)
    note = ""
    witness = s.periodic_witness(2 * n, n)
    if witness is not None:
        note = f"admissible word {s.alphabet.decode(witness)!r} has period below {n}"
    raise MarkerNotFound(max_L, n_cap, note)


def gap_statistics(marker: MarkerSet) -> tuple[int, int]:
    """Smallest and largest distance between consecutive marker hits over all admissible words of length ``L + 2N``."""
    lang = marker.subshift.language(marker.L + 2 * marker.N)
    mask = occurrence_mask(lang, marker.word_array())
    lo, hi = None, 0
    for row in mask:
        pos = np.flatnonzero(row)
        if pos.size >= 2:
            d = np.diff(pos)
            lo = int(d.min()) if lo is None else min(lo, int(d.min()))
            hi = max(hi, int(d.max()))
    return (lo if lo is not None else marker.N, hi)
