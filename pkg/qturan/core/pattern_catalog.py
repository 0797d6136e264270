"""
Builtin pattern catalog.

Each family of builtin patterns maps an id prefix to the edge list of its
members; the pattern service turns the edge list into a validated Pattern.
"""
import re

# P:k directed path, V:r out-star, C4 the one orientation of C4 that embeds
BUILTIN_SPEC_RE = re.compile(r"^(?P<kind>[PV]):(?P<arg>\d+)$|^(?P<c4>C4)$")


def path_edges(k: int) -> list[tuple[int, int]]:
    """Edges 0->1->...->k-1."""
    return [(i, i + 1) for i in range(k - 1)]


def out_star_edges(r: int) -> list[tuple[int, int]]:
    """Edges 0->1, ..., 0->r."""
    return [(0, leaf) for leaf in range(1, r + 1)]


C4_EDGES = [(0, 1), (0, 2), (1, 3), (2, 3)]

BUILTIN_KINDS = {
    "P": ("directed path", lambda k: (k, path_edges(k))),
    "V": ("out-star", lambda r: (r + 1, out_star_edges(r))),
}


def get_builtin(spec: str) -> tuple[int, list[tuple[int, int]]] | None:
    """Vertex count and edges of a builtin id, or None if spec is not builtin."""
    match = BUILTIN_SPEC_RE.match(spec.strip())
    if not match:
        return None
    if match.group("c4"):
        return 4, list(C4_EDGES)
    _, build = BUILTIN_KINDS[match.group("kind")]
    return build(int(match.group("arg")))
