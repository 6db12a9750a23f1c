"""
Finite-alphabet symbolic core.

Words are stored as ``bytes`` whose values are symbol indices into an
:class:`Alphabet`; admissible languages are returned as lexicographically
sorted ``uint8`` arrays of shape ``(count, L)`` and cached per subshift.

Two subshift models are supported:

- SFT: given by a list of forbidden words.  The language is read off the
  essential part of the higher-block (de Bruijn) graph, so every returned
  word extends to a bi-infinite point.
- SUBSTITUTION: a primitive substitution.  The length-``L`` language is the
  smallest set containing the ``L``-subwords of long iterates that is closed
  under one application of the substitution.

Frequency tables index rectangle patterns by tuples of row tuples; the
canonical order used by :func:`measure_distance` is: shapes in the declared
order, then patterns lexicographically over the row-major cell sequence.
"""

from __future__ import annotations

import csv
import json
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyLanguage, ShapeMismatch, ShapeTooLarge

UNFILLED = -1
EXACT_COLUMN_LIMIT = 10**6

Shape = tuple[int, int]
Pattern = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(str(s) for s in self.symbols))
        if len(self.symbols) < 2:
            raise ValueError("an alphabet needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError(f"duplicate symbols in {self.symbols}")
        if len(self.symbols) > 256:
            raise ValueError("at most 256 symbols are supported")

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        return self.symbols.index(symbol)

    def encode(self, text: str | Sequence[str]) -> bytes:
        """Encode a word given as a string of one-character symbols or a list of symbols."""
        if isinstance(text, str):
            if any(len(s) != 1 for s in self.symbols):
                raise ValueError("multi-character alphabets need a list of symbols")
            text = list(text)
        return bytes(self.index(s) for s in text)

    def decode(self, word: bytes | Sequence[int]) -> str:
        return "".join(self.symbols[i] for i in word)


def binary_alphabet() -> Alphabet:
    return Alphabet(("0", "1"))


@dataclass(frozen=True)
class ArraySchema:
    rows: tuple[Alphabet, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))
        if not self.rows:
            raise ValueError("an array schema needs at least one row")

    @property
    def depth(self) -> int:
        return len(self.rows)

    @property
    def radices(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.rows)

    def stacked(self, other: "ArraySchema") -> "ArraySchema":
        return ArraySchema(self.rows + other.rows)


@dataclass(frozen=True, eq=False)
class ArrayWindow:
    """A finite window ``x[1..K] x [first_col, first_col + cols)`` of an array.

    Cells hold symbol indices; ``UNFILLED`` (-1) marks cells with no content.
    """

    schema: ArraySchema
    first_col: int
    cells: np.ndarray

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int16)
        if cells.ndim != 2 or cells.shape[0] != self.schema.depth:
            raise ValueError(f"cells shape {cells.shape} does not match depth {self.schema.depth}")
        radix = np.asarray(self.schema.radices)[:, None]
        if np.any((cells < UNFILLED) | (cells >= radix)):
            raise ValueError("cell value outside its row alphabet")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_words(cls, schema: ArraySchema, rows: Sequence[bytes | Sequence[int]], first_col: int = 0):
        return cls(schema, first_col, np.array([list(r) for r in rows], dtype=np.int16))

    @property
    def cols(self) -> int:
        return self.cells.shape[1]

    @property
    def depth(self) -> int:
        return self.cells.shape[0]

    @property
    def last_col(self) -> int:
        return self.first_col + self.cols - 1

    def shifted(self, steps: int = 1) -> "ArrayWindow":
        """The same cells seen as a window of ``sigma**steps`` of the array."""
        return ArrayWindow(self.schema, self.first_col - steps, self.cells)

    def restrict(self, start: int, stop: int) -> "ArrayWindow":
        """Columns ``start <= j < stop`` in absolute coordinates."""
        a, b = start - self.first_col, stop - self.first_col
        if a < 0 or b > self.cols or a > b:
            raise IndexError(f"columns [{start}, {stop}) not inside the window")
        return ArrayWindow(self.schema, start, self.cells[:, a:b])

    def rows(self, start: int, stop: int) -> "ArrayWindow":
        """Rows ``start..stop-1`` (0-based) as a window of the sub-schema."""
        return ArrayWindow(ArraySchema(self.schema.rows[start:stop]), self.first_col, self.cells[start:stop])

    def render(self) -> list[str]:
        out = []
        for alph, row in zip(self.schema.rows, self.cells):
            out.append("".join("." if c == UNFILLED else alph.symbols[c] for c in row))
        return out

    def __eq__(self, other):
        if not isinstance(other, ArrayWindow):
            return NotImplemented
        return (
            self.schema == other.schema
            and self.first_col == other.first_col
            and np.array_equal(self.cells, other.cells)
        )

    __hash__ = None


@dataclass(frozen=True)
class RectanglePattern:
    """A ``k x n`` rectangle of symbol indices; its cylinder is matched by :meth:`occurs_at`."""

    cells: Pattern

    @property
    def shape(self) -> Shape:
        return (len(self.cells), len(self.cells[0]))

    def occurs_at(self, x: ArrayWindow, col: int, row: int = 0) -> bool:
        k, n = self.shape
        j = col - x.first_col
        if j < 0 or j + n > x.cols or row + k > x.depth:
            return False
        return np.array_equal(x.cells[row:row + k, j:j + n], np.array(self.cells))


# ---------------------------------------------------------------------------
# subshifts


def _occurs(word: bytes, forbidden: Sequence[bytes]) -> bool:
    return any(f in word for f in forbidden)


def _sorted_array(words: Iterable[bytes], length: int) -> np.ndarray:
    words = sorted(words)
    if not words:
        return np.zeros((0, length), dtype=np.uint8)
    return np.frombuffer(b"".join(words), dtype=np.uint8).reshape(len(words), length).copy()


class Subshift:
    """A finite-alphabet subshift exposing a cached language oracle."""

    SFT = "sft"
    SUBSTITUTION = "substitution"

    def __init__(self, alphabet: Alphabet, kind: str, forbidden=(), rules=None, name: str | None = None):
        self.alphabet = alphabet
        self.kind = kind
        self.name = name or kind
        self._cache: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()
        self._orbit: bytes | None = None
        if kind == self.SFT:
            self.forbidden = tuple(sorted(set(bytes(w) for w in forbidden), key=lambda w: (len(w), w)))
            if any(len(w) == 0 for w in self.forbidden):
                raise ValueError("the empty word cannot be forbidden")
            self.rules = None
            self._graph = None
        elif kind == self.SUBSTITUTION:
            if rules is None or len(rules) != alphabet.size:
                raise ValueError("a substitution needs one image word per symbol")
            self.rules = tuple(bytes(r) for r in rules)
            if any(len(r) == 0 for r in self.rules):
                raise ValueError("substitution images must be nonempty")
            self.forbidden = ()
            self._check_primitive()
        else:
            raise ValueError(f"unknown subshift kind {kind!r}")

    # -- construction helpers ------------------------------------------------

    @classmethod
    def sft(cls, alphabet: Alphabet, forbidden: Iterable[str | bytes], name=None) -> "Subshift":
        words = [alphabet.encode(w) if isinstance(w, str) else bytes(w) for w in forbidden]
        return cls(alphabet, cls.SFT, forbidden=words, name=name)

    @classmethod
    def substitution(cls, alphabet: Alphabet, rules: Mapping[str, str], name=None) -> "Subshift":
        images = [alphabet.encode(rules[s]) for s in alphabet.symbols]
        return cls(alphabet, cls.SUBSTITUTION, rules=images, name=name)

    @classmethod
    def from_dict(cls, spec: Mapping) -> "Subshift":
        alphabet = Alphabet(tuple(spec["alphabet"]))
        kind = spec.get("type")
        if kind == cls.SFT:
            return cls.sft(alphabet, spec.get("forbidden", []), name=spec.get("name"))
        if kind == cls.SUBSTITUTION:
            return cls.substitution(alphabet, spec["rules"], name=spec.get("name"))
        raise ValueError(f"unknown subshift type {kind!r}")

    def to_dict(self) -> dict:
        out = {"type": self.kind, "alphabet": list(self.alphabet.symbols)}
        if self.kind == self.SFT:
            out["forbidden"] = [self.alphabet.decode(w) for w in self.forbidden]
        else:
            out["rules"] = {s: self.alphabet.decode(r) for s, r in zip(self.alphabet.symbols, self.rules)}
        return out

    def __repr__(self):
        return f"Subshift({self.name!r}, {self.to_dict()})"

    # -- substitution internals ----------------------------------------------

    def substitution_matrix(self) -> np.ndarray:
        """``M[a, b]`` = number of occurrences of ``a`` in the image of ``b``."""
        m = np.zeros((self.alphabet.size, self.alphabet.size), dtype=np.int64)
        for b, img in enumerate(self.rules):
            for a in img:
                m[a, b] += 1
        return m

    def _check_primitive(self):
        m = (self.substitution_matrix() > 0).astype(np.int64)
        d = self.alphabet.size
        p = m.copy()
        for _ in range((d - 1) ** 2 + 1):
            if np.all(p > 0):
                return
            p = ((p @ m) > 0).astype(np.int64)
        raise ValueError("only primitive substitutions are supported")

    def apply(self, word: bytes) -> bytes:
        return b"".join(self.rules[a] for a in word)

    def iterate(self, seed: int, times: int) -> bytes:
        w = bytes([seed])
        for _ in range(times):
            w = self.apply(w)
        return w

    def _substitution_language(self, L: int) -> set[bytes]:
        seeds = [bytes([a]) for a in range(self.alphabet.size)]
        while min(len(w) for w in seeds) < L:
            seeds = [self.apply(w) for w in seeds]
        words = {w[i:i + L] for w in seeds for i in range(len(w) - L + 1)}
        # closure under one substitution step; grows monotonically, bounded by |A|**L
        frontier = set(words)
        while frontier:
            fresh = set()
            for w in frontier:
                img = self.apply(w)
                for i in range(len(img) - L + 1):
                    u = img[i:i + L]
                    if u not in words:
                        fresh.add(u)
            words |= fresh
            frontier = fresh
        return words

    # -- SFT internals ---------------------------------------------------------

    def _memory(self) -> int:
        return max([1] + [len(f) - 1 for f in self.forbidden])

    def _essential_graph(self):
        if self._graph is not None:
            return self._graph
        m = self._memory()
        blocks = [b""]
        for _ in range(m):
            blocks = [w + bytes([a]) for w in blocks for a in range(self.alphabet.size)]
            blocks = [w for w in blocks if not _occurs(w, self.forbidden)]
        succ = {
            u: [u[1:] + bytes([a]) for a in range(self.alphabet.size)
                if not _occurs(u + bytes([a]), self.forbidden)]
            for u in blocks
        }
        alive = set(blocks)
        changed = True
        while changed:
            changed = False
            has_pred = {v for u in alive for v in succ[u] if v in alive}
            for u in list(alive):
                if u not in has_pred or not any(v in alive for v in succ[u]):
                    alive.discard(u)
                    changed = True
        graph = {u: [v for v in succ[u] if v in alive] for u in sorted(alive)}
        self._graph = (m, graph)
        return self._graph

    def _sft_language(self, L: int) -> set[bytes]:
        m, graph = self._essential_graph()
        if L <= m:
            return {u[:L] for u in graph}
        words = {u: [u] for u in graph}  # keyed by last m letters
        for _ in range(L - m):
            nxt: dict[bytes, list[bytes]] = {}
            for tail, ws in words.items():
                for v in graph[tail]:
                    a = v[-1:]
                    nxt.setdefault(v, []).extend(w + a for w in ws)
            words = nxt
        return {w for ws in words.values() for w in ws}

    # -- public oracle ---------------------------------------------------------

    def language(self, L: int) -> np.ndarray:
        if L < 1:
            raise ValueError("word length must be at least 1")
        with self._lock:
            cached = self._cache.get(L)
            if cached is not None:
                return cached
            if self.kind == self.SFT:
                words = self._sft_language(L)
            else:
                words = self._substitution_language(L)
            if not words:
                raise EmptyLanguage(f"{self.name}: no admissible word of length {L}")
            arr = _sorted_array(words, L)
            arr.setflags(write=False)
            self._cache[L] = arr
            return arr

    def language_set(self, L: int) -> frozenset[bytes]:
        return frozenset(row.tobytes() for row in self.language(L))

    def words(self, L: int) -> list[str]:
        return [self.alphabet.decode(row) for row in self.language(L)]

    def is_admissible(self, word: bytes) -> bool:
        if len(word) == 0:
            return True
        if self.kind == self.SFT:
            m, graph = self._essential_graph()
            if _occurs(word, self.forbidden):
                return False
            if len(word) <= m:
                return word in self.language_set(len(word))
            tail = word[:m]
            if tail not in graph:
                return False
            for a in word[m:]:
                nxt = tail[1:] + bytes([a])
                if nxt not in graph[tail]:
                    return False
                tail = nxt
            return True
        return word in self.language_set(len(word))

    def reference_orbit(self, length: int, rng: np.random.Generator | None = None) -> bytes:
        """A long admissible word; deterministic for substitutions."""
        if self.kind == self.SUBSTITUTION:
            with self._lock:
                if self._orbit is None or len(self._orbit) < length:
                    seed = next((a for a in range(self.alphabet.size) if self.rules[a][0] == a), 0)
                    w = bytes([seed])
                    while len(w) < max(length, 2):
                        w = self.apply(w)
                    self._orbit = w
                return self._orbit
        rng = rng if rng is not None else np.random.default_rng(0)
        return self._random_walk(length, rng)

    def _random_walk(self, length: int, rng: np.random.Generator) -> bytes:
        m, graph = self._essential_graph()
        if not graph:
            raise EmptyLanguage(f"{self.name}: empty subshift")
        keys = list(graph)
        u = keys[rng.integers(len(keys))]
        out = bytearray(u)
        while len(out) < length:
            opts = graph[u]
            u = opts[rng.integers(len(opts))]
            out.append(u[-1])
        return bytes(out[:length])

    def sample_word(self, length: int, rng: np.random.Generator) -> bytes:
        """A random admissible word of the given length."""
        if self.kind == self.SFT:
            return self._random_walk(length, rng)
        orbit = self.reference_orbit(max(8 * length, 4096))
        start = int(rng.integers(0, len(orbit) - length + 1))
        return orbit[start:start + length]

    def periodic_witness(self, length: int, max_period: int) -> bytes | None:
        """An admissible word of the given length with a period below ``max_period``, if any."""
        for row in self.language(length):
            w = row.tobytes()
            for p in range(1, max_period):
                if w[p:] == w[:-p]:
                    return w
        return None


def enumerate_language(s: Subshift, L: int) -> np.ndarray:
    """All admissible words of length ``L`` as a sorted ``(count, L)`` array."""
    return s.language(L)


def load_subshift(path) -> Subshift:
    with open(path) as fh:
        spec = json.load(fh)
    s = Subshift.from_dict(spec)
    if s.name in (Subshift.SFT, Subshift.SUBSTITUTION):
        s.name = Path(path).stem
    return s


def fibonacci() -> Subshift:
    return Subshift.substitution(binary_alphabet(), {"0": "01", "1": "0"}, name="fibonacci")


def thue_morse() -> Subshift:
    return Subshift.substitution(binary_alphabet(), {"0": "01", "1": "10"}, name="thue-morse")


def full_shift(size: int = 2) -> Subshift:
    alphabet = Alphabet(tuple(str(i) for i in range(size)))
    return Subshift.sft(alphabet, [], name=f"full-{size}-shift")


# ---------------------------------------------------------------------------
# frequencies


def universe_size(radices: Sequence[int], shape: Shape) -> int:
    k, n = shape
    return math.prod(radices[r] ** n for r in range(k))


def pattern_rank(radices: Sequence[int], pattern: Pattern) -> int:
    """Position of a pattern in the lexicographic row-major order of its shape."""
    rank = 0
    for r, row in enumerate(pattern):
        for c in row:
            rank = rank * radices[r] + c
    return rank


def parse_pattern(schema: ArraySchema, text: str) -> Pattern:
    rows = text.split("|")
    return tuple(tuple(schema.rows[r].encode(row)) for r, row in enumerate(rows))


def render_pattern(schema: ArraySchema, pattern: Pattern) -> str:
    return "|".join(schema.rows[r].decode(row) for r, row in enumerate(pattern))


@dataclass(frozen=True)
class FrequencyTable:
    shapes: tuple[Shape, ...]
    radices: tuple[int, ...]
    entries: Mapping[Shape, Mapping[Pattern, Fraction | float]]
    provenance: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(tuple(s) for s in self.shapes))
        if any(s not in self.entries for s in self.shapes):
            raise ValueError("every declared shape needs an entry map")
        if max(k for k, _ in self.shapes) > len(self.radices):
            raise ValueError("shape deeper than the row radices")

    def get(self, shape: Shape, pattern: Pattern):
        return self.entries[shape].get(pattern, 0)

    def patterns(self, shape: Shape) -> list[Pattern]:
        return sorted(self.entries[shape], key=lambda p: pattern_rank(self.radices, p))

    def totals(self) -> dict[Shape, float]:
        return {s: float(sum(self.entries[s].values())) for s in self.shapes}

    def validate(self, tol: float = 1e-9) -> None:
        for s, total in self.totals().items():
            if abs(total - 1) > tol:
                raise ValueError(f"frequencies of shape {s} sum to {total}")
            if any(not (0 <= v <= 1) for v in self.entries[s].values()):
                raise ValueError(f"frequency outside [0, 1] for shape {s}")

    def restricted(self, shapes: Sequence[Shape]) -> "FrequencyTable":
        return FrequencyTable(tuple(shapes), self.radices, {s: self.entries[s] for s in shapes}, self.provenance)

    def to_csv(self, path, schema: ArraySchema) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["shape_k", "shape_n", "pattern", "frequency"])
            for s in self.shapes:
                for p in self.patterns(s):
                    w.writerow([s[0], s[1], render_pattern(schema, p), repr(float(self.get(s, p)))])

    @classmethod
    def from_csv(cls, path, schema: ArraySchema, provenance="csv") -> "FrequencyTable":
        entries: dict[Shape, dict[Pattern, float]] = {}
        shapes: list[Shape] = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                s = (int(row["shape_k"]), int(row["shape_n"]))
                if s not in entries:
                    entries[s] = {}
                    shapes.append(s)
                entries[s][parse_pattern(schema, row["pattern"])] = float(row["frequency"])
        return cls(tuple(shapes), schema.radices, entries, provenance)


def placement_codes(grid: np.ndarray, shape: Shape, radices: Sequence[int], row_offsets: Iterable[int]) -> np.ndarray:
    """Rank (see :func:`pattern_rank`) of the ``k x n`` pattern at every placement.

    Returns an array indexed ``[row offset, column]``.
    """
    k, n = shape
    if math.log2(universe_size(radices, shape)) > 62:
        raise ShapeTooLarge(f"shape {shape} has too many patterns to encode")
    cols = grid.shape[1] - n + 1
    out = []
    for r0 in row_offsets:
        code = np.zeros(cols, dtype=np.int64)
        for r in range(k):
            for c in range(n):
                code = code * radices[r0 + r] + grid[r0 + r, c:c + cols]
        out.append(code)
    return np.array(out, dtype=np.int64).reshape(len(out), cols)


def unrank_pattern(radices: Sequence[int], shape: Shape, rank: int) -> Pattern:
    k, n = shape
    cells = []
    for r in reversed(range(k)):
        row = []
        for _ in range(n):
            rank, c = divmod(rank, radices[r])
            row.append(c)
        cells.append(tuple(reversed(row)))
    return tuple(reversed(cells))


def _count_patterns(grid: np.ndarray, shape: Shape, radices: Sequence[int], row_offsets: Iterable[int]):
    row_offsets = list(row_offsets)
    if len(row_offsets) > 1 and len(set(radices)) > 1:
        raise ValueError("counting every vertical placement needs one alphabet for all rows")
    codes = placement_codes(grid, shape, radices, row_offsets)
    uniq, cnt = np.unique(codes, return_counts=True)
    base = [radices[r] for r in range(shape[0])]
    counts = {unrank_pattern(base, shape, int(u)): int(c) for u, c in zip(uniq, cnt)}
    return counts, codes.size


def frequency_table(x: ArrayWindow, shapes: Sequence[Shape], vertical: str = "top") -> FrequencyTable:
    """Empirical rectangle frequencies of a window.

    With ``vertical="top"`` a shape ``(k, n)`` is read on rows ``1..k`` only
    (the cylinder of the array); ``vertical="all"`` counts every vertical
    placement inside the window.
    """
    shapes = [tuple(s) for s in shapes]
    if np.any(x.cells == UNFILLED):
        raise ValueError("window contains unfilled cells")
    entries = {}
    for k, n in shapes:
        if k < 1 or n < 1 or k > x.depth or n > x.cols:
            raise ShapeTooLarge(f"shape {(k, n)} exceeds window {x.depth}x{x.cols}")
        offsets = [0] if vertical == "top" else range(x.depth - k + 1)
        counts, total = _count_patterns(x.cells, (k, n), x.schema.radices, offsets)
        if x.cols <= EXACT_COLUMN_LIMIT:
            entries[(k, n)] = {p: Fraction(c, total) for p, c in counts.items()}
        else:
            entries[(k, n)] = {p: c / total for p, c in counts.items()}
    provenance = f"empirical:{x.cols}"
    return FrequencyTable(tuple(shapes), x.schema.radices, entries, provenance)


def measure_distance(a: FrequencyTable, b: FrequencyTable) -> float:
    """Weighted sum of cylinder-frequency differences, weight ``2**-m`` for the m-th pattern."""
    if a.shapes != b.shapes:
        raise ShapeMismatch(f"shape lists differ: {a.shapes} vs {b.shapes}")
    depth = max(k for k, _ in a.shapes)
    if a.radices[:depth] != b.radices[:depth]:
        raise ShapeMismatch("row alphabets differ")
    radices = a.radices
    total = 0.0
    offset = 0
    for s in a.shapes:
        for p in set(a.entries[s]) | set(b.entries[s]):
            m = offset + pattern_rank(radices, p) + 1
            if m > 1100:
                continue
            total += math.ldexp(abs(float(a.get(s, p)) - float(b.get(s, p))), -m)
        offset += universe_size(radices, s)
    return total


def substitution_frequencies(s: Subshift, n: int) -> dict[bytes, float]:
    """Exact frequencies of length-``n`` words of a primitive substitution subshift.

    Uses the Perron eigenvector of the induced substitution on ``n``-blocks.
    """
    if s.kind != Subshift.SUBSTITUTION:
        raise ValueError("frequencies are computed for substitution subshifts only")
    words = [row.tobytes() for row in s.language(n)]
    index = {w: i for i, w in enumerate(words)}
    m = np.zeros((len(words), len(words)))
    for j, w in enumerate(words):
        img = s.apply(w)
        for i in range(len(s.rules[w[0]])):
            m[index[img[i:i + n]], j] += 1
    vals, vecs = np.linalg.eig(m)
    top = int(np.argmax(vals.real))
    v = np.abs(vecs[:, top].real)
    v /= v.sum()
    return {w: float(f) for w, f in zip(words, v)}


def stacked_target_table(s: Subshift, shapes: Sequence[Shape]) -> FrequencyTable:
    """Exact rectangle frequencies of the array whose row ``r`` is a point shifted by ``r``.

    A ``k x n`` rectangle is then determined by a word of length ``n + k - 1``.
    """
    entries = {}
    depth = max(k for k, _ in shapes)
    for k, n in shapes:
        freqs = substitution_frequencies(s, n + k - 1)
        entries[(k, n)] = {
            tuple(tuple(w[r:r + n]) for r in range(k)): f for w, f in freqs.items() if f > 0
        }
    return FrequencyTable(tuple(tuple(x) for x in shapes), (s.alphabet.size,) * depth, entries, "exact:perron")
