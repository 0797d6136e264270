"""
Forbidden directed patterns: parsing, validation and derived poset data.
"""
from functools import lru_cache
from pathlib import Path
import logging

from pydantic import ValidationError
import networkx as nx

from qturan.core.config import get_settings
from qturan.core.exceptions import PatternError
from qturan.core.pattern_catalog import C4_EDGES, get_builtin
from qturan.models.schemas import Pattern, PatternInfo
from qturan.utils.formats import parse_qpat

logger = logging.getLogger(__name__)


def make_pattern(m: int, edges, name: str = "pattern", labels=None) -> Pattern:
    """Validate and build a Pattern, converting validation failures to PatternError."""
    try:
        return Pattern(m=m, edges=tuple(tuple(e) for e in edges), name=name, labels=labels)
    except ValidationError as e:
        messages = "; ".join(err["msg"].removeprefix("Value error, ") for err in e.errors())
        raise PatternError(f"Invalid pattern '{name}': {messages}") from e


def parse_pattern(spec: str) -> Pattern:
    """
    Parse a pattern spec.

    Args:
        spec: 'P:<k>', 'V:<r>', 'C4' or 'file:<path>' (QPAT v1)

    Returns:
        The validated, acyclic pattern

    Raises:
        PatternError: On a malformed spec, k or r equal to 0, an unreadable
            file or a cyclic pattern
    """
    spec = spec.strip()
    if spec.startswith("file:"):
        path = Path(spec[len("file:"):])
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            raise PatternError(f"Cannot read pattern file '{path}': {e}") from e
        labels, edges = parse_qpat(text)
        logger.info(f"Parsed QPAT pattern '{path.stem}' with {len(labels)} vertices")
        return make_pattern(len(labels), edges, name=path.stem, labels=tuple(labels))

    builtin = get_builtin(spec)
    if builtin is None:
        raise PatternError(f"Unknown pattern spec '{spec}' (expected P:<k>, V:<r>, C4 or file:<path>)")
    if spec != "C4" and int(spec.split(":")[1]) == 0:
        raise PatternError(f"Pattern parameter must be at least 1 in '{spec}'")
    m, edges = builtin
    return make_pattern(m, edges, name=spec)


def _longest_paths(p: Pattern) -> tuple[list[int], list[int]]:
    """Vertex counts of the longest directed path ending at / starting at each vertex."""
    g = p.graph()
    order = list(nx.topological_sort(g))
    down = [1] * p.m
    for x in order:
        for y in g.successors(x):
            down[y] = max(down[y], down[x] + 1)
    up = [1] * p.m
    for x in reversed(order):
        for y in g.successors(x):
            up[x] = max(up[x], up[y] + 1)
    return down, up


def _is_saturated(g: nx.DiGraph, height: int) -> bool:
    """Every maximal chain of the poset has `height` elements."""
    hasse = nx.transitive_reduction(g)
    minimal = [x for x in hasse if hasse.in_degree(x) == 0]
    maximal = [x for x in hasse if hasse.out_degree(x) == 0]
    for source in minimal:
        if source in maximal:
            # isolated element: a one-element maximal chain
            if height != 1:
                return False
            continue
        for path in nx.all_simple_paths(hasse, source, maximal):
            if len(path) != height:
                return False
    return True


@lru_cache(maxsize=256)
def pattern_info(p: Pattern) -> PatternInfo:
    """
    Derive height, tree flag, saturation and per-vertex level windows.

    Saturation is only decided for tree posets and is None otherwise.
    """
    down, up = _longest_paths(p)
    height = max(down)
    g = p.graph()
    is_tree = nx.is_tree(g.to_undirected(as_view=True))
    saturated = _is_saturated(g, height) if is_tree else None
    return PatternInfo(
        height=height,
        is_tree=is_tree,
        is_saturated=saturated,
        level_window=tuple(zip(down, up)),
    )


def opposite_pattern(p: Pattern) -> Pattern:
    """Reverse every edge; applying it twice gives back the same pattern."""
    if p.name.startswith("opp(") and p.name.endswith(")"):
        name = p.name[4:-1]
    else:
        name = f"opp({p.name})"
    return make_pattern(p.m, [(v, u) for u, v in p.edges], name=name, labels=p.labels)


def is_directed_path(p: Pattern) -> bool:
    """True when p is P_m (up to relabeling)."""
    return pattern_info(p).height == p.m and len(p.edges) == p.m - 1


def out_star_leaves(p: Pattern) -> int | None:
    """Number of leaves r when p is the out-star V_r (up to relabeling), else None."""
    if p.m < 2 or len(p.edges) != p.m - 1:
        return None
    sources = {u for u, _ in p.edges}
    if len(sources) != 1:
        return None
    return p.m - 1


def is_oriented_c4(p: Pattern) -> bool:
    """True when p is isomorphic to the oriented C4 that embeds in the cube."""
    c4 = nx.DiGraph(C4_EDGES)
    return p.m == 4 and nx.is_isomorphic(p.graph(), c4)


def check_enumerable(p: Pattern) -> Pattern:
    """Reject patterns too large for embedding enumeration (MAX_PATTERN_SIZE)."""
    cap = get_settings().MAX_PATTERN_SIZE
    if p.m > cap:
        raise PatternError(f"Pattern '{p.name}' has {p.m} vertices; embedding search supports at most {cap}")
    return p
