"""
Lower and upper bounds for ex_v(F, Q_n) per pattern class.
"""
import logging

from pydantic import BaseModel

from qturan.core.config import get_settings
from qturan.core.exceptions import DimensionError
from qturan.core.hypercube import binomial
from qturan.models.schemas import BoundReport, Pattern
from qturan.services.chains import formula_pk, tree_upper_estimate
from qturan.services.construct import best_construction_size
from qturan.services.pattern import (
    is_directed_path,
    is_oriented_c4,
    opposite_pattern,
    out_star_leaves,
    pattern_info,
)

logger = logging.getLogger(__name__)


class TableRow(BaseModel):
    """One CSV row: n,lower,upper,exact,certified,method."""
    n: int
    lower: int
    upper: int
    exact: bool
    certified: bool
    method: str


def residue_maximum(n: int, k: int) -> int:
    """max over residues j mod k of the sum of C(n, i) over i not congruent to j; any k >= 1."""
    return 2 ** n - min(sum(binomial(n, i) for i in range(j, n + 1, k)) for j in range(k))


def _direct_upper_bound(n: int, p: Pattern) -> tuple[int, str, bool]:
    universe = 2 ** n
    if is_directed_path(p):
        if p.m <= n:
            return formula_pk(n, p.m), "formula_pk", True
        return residue_maximum(n, p.m), "chain length", True
    leaves = out_star_leaves(p)
    if leaves is not None and leaves > n:
        return universe, "trivial", True
    if leaves == 2:
        return 2 ** (n - 1) + 1, "theorem_v2", True
    if is_oriented_c4(p):
        return residue_maximum(n, 3), "c4_known_value", True
    info = pattern_info(p)
    if info.is_tree and p.m <= get_settings().MAX_PATTERN_SIZE:
        return tree_upper_estimate(n, info.height, p.m), "tree_upper_estimate", False
    return universe, "trivial", True


def upper_bound(n: int, p: Pattern) -> tuple[int, str, bool]:
    """
    Best known upper bound as (value, method, certified).

    Certified: directed paths, the V_2 out-star, the oriented C4 (cited exact
    value), out-stars too large to embed and the trivial 2^n. Other trees
    get the asymptotic-only estimate, never certified. ex_v(F) = ex_v(opp F)
    by complementation, so a certified bound for the opposite pattern is
    used when p has none or a weaker one.
    """
    cap = get_settings().MAX_FORMULA_DIM
    if not 1 <= n <= cap:
        raise DimensionError(f"Dimension n={n} outside 1..{cap}")
    direct = _direct_upper_bound(n, p)
    value, method, certified = _direct_upper_bound(n, opposite_pattern(p))
    candidates = [direct, (value, f"{method} of opposite", certified)]
    return min([c for c in candidates if c[2]] or candidates, key=lambda c: c[0])


def pattern_bounds(n: int, p: Pattern) -> BoundReport:
    """Construction size against the best upper bound for one instance."""
    lower, lower_method = best_construction_size(n, p)
    upper, upper_method, certified = upper_bound(n, p)
    report = BoundReport(
        pattern=p.name,
        n=n,
        lower=lower,
        lower_method=lower_method,
        upper=upper,
        upper_method=upper_method,
        certified=certified,
        vacuous=upper >= 2 ** n and not certified,
    )
    logger.info(f"Bounds for {p.name} at n={n}: {lower} <= ex_v <= {upper} ({upper_method})")
    return report


def bound_table(p: Pattern, n_values) -> list[TableRow]:
    """Rows of the bound table; exact means lower and upper agree under a certified bound."""
    rows = []
    for n in n_values:
        report = pattern_bounds(n, p)
        rows.append(
            TableRow(
                n=n,
                lower=report.lower,
                upper=report.upper,
                exact=report.certified and report.lower == report.upper,
                certified=report.certified,
                method=f"{report.lower_method}|{report.upper_method}",
            )
        )
    return rows
