"""
The oriented hypercube Q_n: vertices as bitmasks, families of vertices and
the lattice arithmetic every other module builds on.

Element i of [n] lives in bit i-1 of a vertex mask. Every edge of the
oriented cube goes from a set A to A | {x}, so it raises the level
(popcount) by exactly one.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence
import logging
import math

import numpy as np

from qturan.core.config import get_settings
from qturan.core.exceptions import DimensionError, InvalidFamilyError

logger = logging.getLogger(__name__)

Dim = int
Vertex = int


def check_dim(n: int, cap: int | None = None) -> int:
    """Validate a cube dimension against a cap (the explicit-family cap by default)."""
    if cap is None:
        cap = get_settings().MAX_FAMILY_DIM
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DimensionError(f"Dimension must be an integer, got {n!r}")
    if not 1 <= n <= cap:
        raise DimensionError(f"Dimension n={n} outside 1..{cap}")
    return int(n)


def level(v: Vertex) -> int:
    """Level of a vertex, i.e. the size of the set it encodes."""
    return int(v).bit_count()


def binomial(n: int, i: int) -> int:
    """Exact binomial coefficient C(n, i) for 0 <= i <= n <= MAX_FORMULA_DIM."""
    cap = get_settings().MAX_FORMULA_DIM
    if not 0 <= n <= cap:
        raise DimensionError(f"binomial: n={n} outside 0..{cap}")
    if not 0 <= i <= n:
        raise DimensionError(f"binomial: i={i} outside 0..{n}")
    return math.comb(n, i)


def out_neighbors(n: Dim, v: Vertex) -> list[Vertex]:
    """Vertices reached from v by adding one missing element, in ascending element order."""
    return [v | (1 << b) for b in range(n) if not v >> b & 1]


def in_neighbors(n: Dim, v: Vertex) -> list[Vertex]:
    """Vertices that reach v by adding one element."""
    return [v ^ (1 << b) for b in range(n) if v >> b & 1]


def set_to_mask(elements: Iterable[int], n: Dim) -> Vertex:
    """Encode a list of elements of [n] as a vertex mask."""
    mask = 0
    for x in elements:
        if isinstance(x, bool) or not isinstance(x, (int, np.integer)):
            raise InvalidFamilyError(f"Element {x!r} is not an integer")
        if not 1 <= x <= n:
            raise InvalidFamilyError(f"Element {x} outside 1..{n}")
        bit = 1 << (int(x) - 1)
        if mask & bit:
            raise InvalidFamilyError(f"Element {x} repeated inside one set")
        mask |= bit
    return mask


def mask_to_set(v: Vertex) -> list[int]:
    """Sorted elements of the set encoded by v."""
    v = int(v)
    return [b + 1 for b in range(v.bit_length()) if v >> b & 1]


BLOCK_VERTICES = 1 << 18  # vertices per streaming block, a multiple of 8

# byte -> byte with its bit order reversed
_REVERSED_BYTES = np.packbits(
    np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1, bitorder="little"),
    axis=1,
    bitorder="big",
).ravel()


def vertex_blocks(n: Dim) -> Iterator[tuple[int, int]]:
    """Consecutive [start, stop) ranges covering 0..2^n-1."""
    universe = 1 << n
    for start in range(0, universe, BLOCK_VERTICES):
        yield start, min(start + BLOCK_VERTICES, universe)


def _bitset_bytes(n: Dim) -> int:
    return ((1 << n) + 7) >> 3


def _hist_of(n: Dim, masks: np.ndarray) -> np.ndarray:
    return np.bincount(np.bitwise_count(masks), minlength=n + 1)[: n + 1].astype(np.int64)


@dataclass(frozen=True, eq=False)
class Family:
    """
    An immutable set of vertices of Q_n.

    Membership is a packed bitset (little bit order, bit v <-> vertex v),
    2^n bits in total, with the level histogram cached next to it. Nothing
    here builds an array over the whole cube: scans go block by block.
    """

    n: Dim
    bits: np.ndarray
    level_hist: tuple[int, ...]

    @classmethod
    def _wrap(cls, n: Dim, bits: np.ndarray, hist) -> "Family":
        bits.setflags(write=False)
        return cls(n=n, bits=bits, level_hist=tuple(int(c) for c in hist))

    @classmethod
    def from_indicator(cls, n: Dim, indicator: np.ndarray) -> "Family":
        """Build from a boolean array of length 2^n."""
        n = check_dim(n)
        indicator = np.asarray(indicator, dtype=bool)
        if indicator.shape != (1 << n,):
            raise InvalidFamilyError(f"Indicator must have length 2^{n}, got {indicator.shape}")
        bits = np.packbits(indicator, bitorder="little")
        hist = np.zeros(n + 1, dtype=np.int64)
        for start, stop in vertex_blocks(n):
            hist += _hist_of(n, np.flatnonzero(indicator[start:stop]) + start)
        return cls._wrap(n, bits, hist)

    @classmethod
    def from_masks(cls, n: Dim, masks: Iterable[Vertex], allow_duplicates: bool = False) -> "Family":
        """Build from vertex masks; repeated masks are an error unless allowed."""
        n = check_dim(n)
        raw = np.fromiter((int(m) for m in masks), dtype=np.int64)
        if raw.size and (raw.min() < 0 or raw.max() >= 1 << n):
            raise InvalidFamilyError(f"Vertex mask outside 0..2^{n}-1")
        arr = np.unique(raw)
        if not allow_duplicates and arr.size != raw.size:
            raise InvalidFamilyError("Duplicate set in family")
        bits = np.zeros(_bitset_bytes(n), dtype=np.uint8)
        np.bitwise_or.at(bits, arr >> 3, np.left_shift(1, arr & 7).astype(np.uint8))
        return cls._wrap(n, bits, _hist_of(n, arr))

    @classmethod
    def from_levels(cls, n: Dim, levels: Iterable[int]) -> "Family":
        """Every vertex whose level is in `levels`, packed one block at a time."""
        n = check_dim(n)
        wanted = np.zeros(n + 1, dtype=bool)
        wanted[list(levels)] = True
        bits = np.zeros(_bitset_bytes(n), dtype=np.uint8)
        for start, stop in vertex_blocks(n):
            block = wanted[np.bitwise_count(np.arange(start, stop, dtype=np.int64))]
            bits[start >> 3:(stop + 7) >> 3] = np.packbits(block, bitorder="little")
        hist = [math.comb(n, i) if wanted[i] else 0 for i in range(n + 1)]
        return cls._wrap(n, bits, hist)

    @classmethod
    def empty(cls, n: Dim) -> "Family":
        n = check_dim(n)
        return cls._wrap(n, np.zeros(_bitset_bytes(n), dtype=np.uint8), [0] * (n + 1))

    @classmethod
    def full(cls, n: Dim) -> "Family":
        return cls.from_levels(n, range(n + 1))

    @property
    def universe(self) -> int:
        return 1 << self.n

    def indicator(self) -> np.ndarray:
        """Whole-cube boolean array; 2^n bytes, so only for small n."""
        return np.unpackbits(self.bits, count=self.universe, bitorder="little").astype(bool)

    def member_blocks(self) -> Iterator[np.ndarray]:
        """Member masks in ascending order, at most BLOCK_VERTICES vertices' worth at a time."""
        for start, stop in vertex_blocks(self.n):
            block = np.unpackbits(self.bits[start >> 3:(stop + 7) >> 3], count=stop - start, bitorder="little")
            yield np.flatnonzero(block).astype(np.int64) + start

    def members(self) -> np.ndarray:
        """Member masks in ascending order."""
        return np.concatenate(list(self.member_blocks()))

    def members_at_level(self, i: int) -> np.ndarray:
        if not 0 <= i <= self.n or self.level_hist[i] == 0:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([ms[np.bitwise_count(ms) == i] for ms in self.member_blocks()])

    def contains_many(self, masks: np.ndarray) -> np.ndarray:
        """Vectorized membership test for in-range masks."""
        masks = np.asarray(masks, dtype=np.int64)
        return ((self.bits[masks >> 3] >> (masks & 7)) & 1).astype(bool)

    def __contains__(self, v: object) -> bool:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.universe:
            return False
        v = int(v)
        return bool(self.bits[v >> 3] >> (v & 7) & 1)

    def __len__(self) -> int:
        return sum(self.level_hist)

    def __iter__(self) -> Iterator[Vertex]:
        for ms in self.member_blocks():
            yield from (int(v) for v in ms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash((self.n, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"Family(n={self.n}, size={len(self)}, levels={self.level_hist})"

    def issubset(self, other: "Family") -> bool:
        return self.n == other.n and not np.any(self.bits & ~other.bits)

    def with_vertices(self, masks: Iterable[Vertex]) -> "Family":
        extra = np.unique(np.fromiter((int(m) for m in masks), dtype=np.int64))
        if extra.size and (extra.min() < 0 or extra.max() >= self.universe):
            raise InvalidFamilyError(f"Vertex mask outside 0..2^{self.n}-1")
        extra = extra[~self.contains_many(extra)]
        bits = self.bits.copy()
        np.bitwise_or.at(bits, extra >> 3, np.left_shift(1, extra & 7).astype(np.uint8))
        return Family._wrap(self.n, bits, np.asarray(self.level_hist, dtype=np.int64) + _hist_of(self.n, extra))

    def to_sets(self) -> list[list[int]]:
        return [mask_to_set(v) for v in self]


def make_family(n: Dim, sets: Sequence[Sequence[int]]) -> Family:
    """
    Build a family from explicit element lists.

    Args:
        n: Cube dimension (1..MAX_FAMILY_DIM)
        sets: Element lists with entries in 1..n

    Returns:
        The family holding exactly those sets

    Raises:
        InvalidFamilyError: On an element out of range or a duplicate set
        DimensionError: If n is over the cap
    """
    n = check_dim(n)
    masks = [set_to_mask(s, n) for s in sets]
    if len(set(masks)) != len(masks):
        raise InvalidFamilyError("Duplicate set in family")
    return Family.from_masks(n, masks)


def complement_family(f: Family) -> Family:
    """The family {[n] \\ F : F in f}; reverses the level histogram."""
    if f.universe < 8:
        full = f.universe - 1
        return Family.from_masks(f.n, [full ^ v for v in f])
    # [n] \ v = 2^n-1-v, so the bitset is read backwards
    bits = _REVERSED_BYTES[f.bits[::-1]]
    return Family._wrap(f.n, bits, reversed(f.level_hist))
