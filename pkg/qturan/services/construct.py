"""
Lower-bound constructions: families made of whole cube levels.
"""
from fractions import Fraction
from typing import Iterable
import logging

from pydantic import ValidationError

from qturan.core.config import get_settings
from qturan.core.exceptions import DimensionError, NotFreeError
from qturan.core.hypercube import Family, binomial, check_dim
from qturan.models.schemas import GrowthRow, LevelSet, Pattern
from qturan.services.pattern import opposite_pattern, out_star_leaves, pattern_info

logger = logging.getLogger(__name__)


def make_level_set(n: int, levels: Iterable[int]) -> LevelSet:
    try:
        return LevelSet(n=n, included=frozenset(levels))
    except ValidationError as e:
        raise DimensionError(f"Invalid level set for n={n}: {e.errors()[0]['msg']}") from e


def level_set_size(ls: LevelSet) -> int:
    """Sum of C(n, i) over the included levels; valid up to MAX_FORMULA_DIM."""
    return sum(binomial(ls.n, i) for i in ls.included)


def levels_family(n: int, ls: LevelSet) -> Family:
    """All vertices whose level lies in ls.included."""
    n = check_dim(n)
    if ls.n != n:
        raise DimensionError(f"Level set is for n={ls.n}, not n={n}")
    return Family.from_levels(n, ls.included)


def _check_residue_args(n: int, k: int, j: int | None = None) -> None:
    if not 1 <= k <= n:
        raise DimensionError(f"Need 1 <= k <= n, got k={k}, n={n}")
    if j is not None and not 1 <= j <= k:
        raise DimensionError(f"Residue index j={j} outside 1..{k}")


def residue_levels(n: int, k: int, j: int) -> LevelSet:
    """Levels i in 0..n with i not congruent to j mod k."""
    _check_residue_args(n, k, j)
    return make_level_set(n, (i for i in range(n + 1) if (i - j) % k != 0))


def residue_class_sums(n: int, k: int) -> list[int]:
    """sums[j-1] = sum of C(n, i) over i congruent to j mod k, for j in 1..k."""
    _check_residue_args(n, k)
    return [sum(binomial(n, i) for i in range(n + 1) if (i - j) % k == 0) for j in range(1, k + 1)]


def best_residue(n: int, k: int) -> int:
    """The j in 1..k whose excluded residue class is lightest; ties go to the smallest j."""
    sums = residue_class_sums(n, k)
    return sums.index(min(sums)) + 1


def residue_levels_family(n: int, k: int, j: int | None = None) -> Family:
    """
    P_k-free family of all levels outside one residue class mod k.

    No k consecutive levels survive, so no directed path on k vertices does.

    Args:
        n: Cube dimension
        k: Path length, 1 <= k <= n
        j: Residue index in 1..k; the best one when omitted
    """
    if j is None:
        j = best_residue(n, k)
    return levels_family(n, residue_levels(n, k, j))


def v2_levels(n: int) -> LevelSet:
    """Levels n-1, n-3, ... plus the top level n."""
    if n < 2:
        raise DimensionError(f"v2_family needs n >= 2, got {n}")
    return make_level_set(n, [n, *range(n - 1, -1, -2)])


def v2_family(n: int) -> Family:
    """Every second level from n-1 down, plus [n]; size 2^(n-1)+1 and V_2-free."""
    return levels_family(n, v2_levels(n))


def vr_levels(n: int, r: int) -> LevelSet:
    """The r highest levels, one empty level, then every other level below."""
    if not 2 <= r <= n:
        raise DimensionError(f"vr_family needs 2 <= r <= n, got r={r}, n={n}")
    top = range(n, n - r, -1)
    return make_level_set(n, [*top, *range(n - r - 1, -1, -2)])


def vr_family(n: int, r: int) -> Family:
    """
    V_r-free family: top r levels and every other level below them.

    A member of the lowest top-block level has r-1 out-neighbors inside the
    family, and nothing below the gap reaches a member.
    """
    return levels_family(n, vr_levels(n, r))


def vr_growth_report(r: int, n_values: Iterable[int]) -> list[GrowthRow]:
    """Exact size, excess over 2^(n-1) and excess / n^(r-2) of vr_family."""
    rows = []
    for n in n_values:
        size = level_set_size(vr_levels(n, r))
        excess = size - 2 ** (n - 1)
        rows.append(GrowthRow(n=n, size=size, excess=excess, ratio=Fraction(excess, n ** (r - 2))))
    return rows


def _direct_construction_levels(n: int, p: Pattern) -> tuple[LevelSet, str]:
    whole = make_level_set(n, range(n + 1)), "whole cube"
    leaves = out_star_leaves(p)
    if leaves is not None and leaves > n:
        return whole
    if leaves == 2:
        return v2_levels(n), "v2_family"
    if leaves is not None and leaves >= 3:
        return vr_levels(n, leaves), f"vr_family(r={leaves})"
    h = pattern_info(p).height
    if h > n + 1 or p.m > 2 ** n:
        return whole
    if h == n + 1:
        # n levels hold no directed path on n+1 vertices
        return make_level_set(n, range(1, n + 1)), "levels 1..n"
    j = best_residue(n, h)
    return residue_levels(n, h, j), f"residue_levels(k={h}, j={j})"


def best_construction_levels(n: int, p: Pattern) -> tuple[LevelSet, str]:
    """
    The strongest level construction known to avoid p.

    Out-stars use the V_2 / V_r layouts; every other pattern of height h
    uses the residue family for k = h, since any copy contains a directed
    path on h vertices. Complementing an opp(p)-free family gives a p-free
    one, so the opposite pattern's construction, with levels i -> n-i,
    wins when it is strictly larger.
    """
    ls, method = _direct_construction_levels(n, p)
    dual, dual_method = _direct_construction_levels(n, opposite_pattern(p))
    if level_set_size(dual) > level_set_size(ls):
        return make_level_set(n, (n - i for i in dual.included)), f"complement of {dual_method}"
    return ls, method


def best_construction_size(n: int, p: Pattern) -> tuple[int, str]:
    """Size of best_construction without materializing it (n up to MAX_FORMULA_DIM)."""
    cap = get_settings().MAX_FORMULA_DIM
    if not 1 <= n <= cap:
        raise DimensionError(f"Dimension n={n} outside 1..{cap}")
    ls, method = best_construction_levels(n, p)
    return level_set_size(ls), method


def best_construction(n: int, p: Pattern, verify: bool = True) -> tuple[Family, str]:
    """Materialize the best construction, optionally re-checking freeness."""
    from qturan.services.detect import is_free

    ls, method = best_construction_levels(check_dim(n), p)
    family = levels_family(n, ls)
    if verify:
        if not is_free(family, p):
            raise NotFreeError(f"Construction {method} is not {p.name}-free at n={n}")
        logger.info(f"✅ Verified {method} is {p.name}-free at n={n} (size {len(family)})")
    return family, method
