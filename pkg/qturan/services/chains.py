"""
Exact chain statistics over the Boolean lattice and the bounds built on them.

All counting is exact. The chain DP streams the cube one level at a time and
only keeps two level slices in memory; it runs on int64 while the largest
possible value fits and on Python integers (object arrays) beyond that.
"""
from fractions import Fraction
from functools import lru_cache
from math import ceil, factorial
import logging

import numpy as np

from qturan.core.config import get_settings
from qturan.core.exceptions import DimensionError
from qturan.core.hypercube import Family, binomial
from qturan.models.schemas import ChainStats, LubellValue
from qturan.services.construct import residue_class_sums

logger = logging.getLogger(__name__)

_INT64_SAFE = 2 ** 62


@lru_cache(maxsize=4)
def _level_layout(n: int) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """Masks of each level in ascending order, and each mask's position inside its level."""
    masks = np.arange(1 << n, dtype=np.int64)
    levels = np.bitwise_count(masks).astype(np.int64)
    order = np.argsort(levels, kind="stable")
    starts = np.concatenate([[0], np.cumsum(np.bincount(levels, minlength=n + 1))])
    pos = np.empty(1 << n, dtype=np.int32)
    pos[order] = np.arange(1 << n) - starts[levels[order]]
    by_level = tuple(order[starts[i]:starts[i + 1]] for i in range(n + 1))
    return by_level, pos


def _check_chain_dim(f: Family) -> None:
    cap = get_settings().MAX_CHAIN_DIM
    if f.n > cap:
        raise DimensionError(f"Chain DP supports n <= {cap}, got n={f.n}")


def _dtype_for(bound: int):
    return np.int64 if bound < _INT64_SAFE else object


def _sum_over_in_neighbors(n: int, ms: np.ndarray, cur: np.ndarray, pos: np.ndarray) -> np.ndarray:
    """Row w of the result = sum of rows of cur over the in-neighbors of w."""
    nxt = np.zeros((ms.size,) + cur.shape[1:], dtype=cur.dtype)
    for b in range(n):
        has = (ms >> b) & 1 == 1
        if np.any(has):
            nxt[has] += cur[pos[ms[has] ^ (1 << b)]]
    return nxt


def _shift(block: np.ndarray, capped: bool) -> np.ndarray:
    """Move every count from t to t+1; the last column absorbs overflow when capped."""
    shifted = np.zeros_like(block)
    shifted[:, 1:] = block[:, :-1]
    if capped:
        shifted[:, -1] += block[:, -1]
    return shifted


def _chain_counts(f: Family, width: int, capped: bool) -> list[int]:
    """
    Count maximal chains by the number of family members they contain.

    ways(v, t) counts cover paths from the empty set to v meeting f in t sets
    (v included). Column width-1 means "at least width-1" when capped.
    """
    n = f.n
    by_level, pos = _level_layout(n)
    dtype = _dtype_for(factorial(n))
    cur = np.zeros((1, width), dtype=dtype)
    cur[0, 0] = 1
    if 0 in f:
        cur = _shift(cur, capped)
    for i in range(1, n + 1):
        ms = by_level[i]
        nxt = _sum_over_in_neighbors(n, ms, cur, pos)
        inside = f.contains_many(ms)
        if np.any(inside):
            nxt[inside] = _shift(nxt[inside], capped)
        cur = nxt
    return [int(c) for c in cur[0]]


def lubell(f: Family) -> LubellValue:
    """
    Lubell function of f: the average number of members on a maximal chain.

    The numerator sum |F|!(n-|F|)! is exact; the value is numerator / n!.
    """
    n = f.n
    numerator = sum(c * factorial(i) * factorial(n - i) for i, c in enumerate(f.level_hist))
    return LubellValue(n=n, numerator=numerator)


def chain_profile(f: Family) -> ChainStats:
    """Exact C_0..C_{n+1}: maximal chains by number of members they contain."""
    _check_chain_dim(f)
    counts = _chain_counts(f, f.n + 2, capped=False)
    stats = ChainStats(n=f.n, counts=tuple(counts))
    logger.debug(f"chain_profile n={f.n} |f|={len(f)}: {stats.counts}")
    return stats


def fat_chain_count(f: Family, k: int) -> int:
    """Maximal chains containing at least k members of f."""
    _check_chain_dim(f)
    if k <= 0:
        return factorial(f.n)
    if k > f.n + 1:
        return 0
    return _chain_counts(f, k + 1, capped=True)[k]


def total_chain_weight(f: Family) -> int:
    """
    Sum over maximal chains C of sum_{F in C and f} C(n, |F|).

    Computed by its own level DP, W(v) = sum of W over in-neighbors plus
    C(n,|v|)·|v|! when v is a member, so it can be checked against |f|·n!.
    """
    _check_chain_dim(f)
    n = f.n
    by_level, pos = _level_layout(n)
    dtype = _dtype_for((1 << n) * factorial(n))
    cur = np.zeros((1, 1), dtype=dtype)
    if 0 in f:
        cur[0, 0] = 1
    for i in range(1, n + 1):
        ms = by_level[i]
        nxt = _sum_over_in_neighbors(n, ms, cur, pos)
        inside = f.contains_many(ms)
        nxt[inside, 0] += binomial(n, i) * factorial(i)
        cur = nxt
    return int(cur[0, 0])


def _check_formula_args(n: int, k: int) -> None:
    cap = get_settings().MAX_FORMULA_DIM
    if not 1 <= k <= n <= cap:
        raise DimensionError(f"Need 1 <= k <= n <= {cap}, got k={k}, n={n}")


def formula_pk_detail(n: int, k: int) -> tuple[int, int]:
    """(value, minimizing residue j in 1..k) of the directed path formula."""
    _check_formula_args(n, k)
    sums = residue_class_sums(n, k)
    lightest = min(sums)
    return 2 ** n - lightest, sums.index(lightest) + 1


def formula_pk(n: int, k: int) -> int:
    """max over j of the sum of C(n, i) over i not congruent to j mod k."""
    return formula_pk_detail(n, k)[0]


def pk_weight_bound(n: int, k: int) -> int:
    """
    Best chain weight 2^n - sum C(n, a_i) over admissible exclusion sequences.

    The excluded levels 0 <= a_1 < ... < a_t <= n of a chain avoiding k
    consecutive members satisfy a_1 <= k-1, a_t >= n-k+1 and gaps of at most
    k. Solved by DP over the last excluded level, independently of the
    residue-class closed form.
    """
    _check_formula_args(n, k)
    cheapest: list[int] = []
    for a in range(n + 1):
        weight = binomial(n, a)
        if a <= k - 1:
            cheapest.append(weight)
        else:
            cheapest.append(weight + min(cheapest[max(a - k, 0):a]))
    return 2 ** n - min(cheapest[n - k + 1:])


def tail_sum(n: int) -> int:
    """Sizes of the levels at most floor(n/4) plus those at least ceil(3n/4)."""
    low = n // 4
    high = -(-3 * n // 4)
    return sum(binomial(n, i) for i in range(0, low + 1)) + sum(binomial(n, i) for i in range(high, n + 1))


def tree_upper_estimate(n: int, h: int, t_size: int) -> int:
    """
    Asymptotic-only size estimate for families avoiding a tree of height h.

    ceil([(h-1 + 4h·t²/n)(2^n + h·C(n, n/2)) + h·tail(n)] / h), evaluated
    with exact rationals. Never a certified bound: the underlying counting
    only holds beyond an unspecified dimension.
    """
    cap = get_settings().MAX_FORMULA_DIM
    size_cap = get_settings().MAX_PATTERN_SIZE
    if not 2 <= h <= t_size <= size_cap:
        raise DimensionError(f"Need 2 <= h <= t_size <= {size_cap}, got h={h}, t_size={t_size}")
    if not 1 <= n <= cap:
        raise DimensionError(f"Dimension n={n} outside 1..{cap}")
    factor = Fraction(h - 1) + Fraction(4 * h * t_size ** 2, n)
    total = factor * (2 ** n + h * binomial(n, n // 2)) + h * tail_sum(n)
    return ceil(total / h)
