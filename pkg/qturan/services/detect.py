"""
Copy detection in the subgraph of the oriented cube induced by a family.

A copy is an injective map sending every pattern edge u->v to a cover edge
map(u) -> map(v) = map(u) | {x} between family members. Non-edges of the
pattern impose nothing (subgraph, not induced).
"""
from typing import Iterator, Optional
import logging

import numpy as np

from qturan.core.hypercube import Family, Vertex, in_neighbors, level, out_neighbors
from qturan.models.schemas import Embedding, Pattern
from qturan.services.pattern import check_enumerable, is_directed_path, out_star_leaves, pattern_info

logger = logging.getLogger(__name__)


def _placement_order(p: Pattern) -> list[int]:
    """Connected ordering: every vertex after the first of its component touches a placed one."""
    g = p.graph().to_undirected(as_view=True)
    order: list[int] = []
    placed = set()
    for root in range(p.m):
        if root in placed:
            continue
        frontier = [root]
        placed.add(root)
        while frontier:
            x = frontier.pop(0)
            order.append(x)
            for y in sorted(g.neighbors(x)):
                if y not in placed:
                    placed.add(y)
                    frontier.append(y)
    return order


class _Embedder:
    """Backtracking embedder over pattern vertices in connected order."""

    def __init__(self, f: Family, p: Pattern):
        self.f = f
        self.p = p
        self.n = f.n
        self.order = _placement_order(p)
        info = pattern_info(p)
        self.windows = [(down - 1, self.n - up + 1) for down, up in info.level_window]
        self.preds = [[] for _ in range(p.m)]
        self.succs = [[] for _ in range(p.m)]
        for u, v in p.edges:
            self.succs[u].append(v)
            self.preds[v].append(u)
        self._members_by_level: dict[int, list[int]] = {}
        self.images: list[Optional[Vertex]] = [None] * p.m
        self.used: set[Vertex] = set()

    def _level_members(self, i: int) -> list[int]:
        if i not in self._members_by_level:
            self._members_by_level[i] = self.f.members_at_level(i).tolist()
        return self._members_by_level[i]

    def _candidates(self, x: int) -> list[Vertex]:
        low, high = self.windows[x]
        anchored = None
        for u in self.preds[x]:
            if self.images[u] is not None:
                anchored = out_neighbors(self.n, self.images[u])
                break
        if anchored is None:
            for v in self.succs[x]:
                if self.images[v] is not None:
                    anchored = in_neighbors(self.n, self.images[v])
                    break
        if anchored is None:
            pool = [w for i in range(max(low, 0), min(high, self.n) + 1) for w in self._level_members(i)]
        else:
            pool = [w for w in anchored if w in self.f and low <= level(w) <= high]
        result = []
        for w in sorted(pool):
            if w in self.used:
                continue
            if any(self.images[u] is not None and not _is_cover(self.images[u], w) for u in self.preds[x]):
                continue
            if any(self.images[v] is not None and not _is_cover(w, self.images[v]) for v in self.succs[x]):
                continue
            result.append(w)
        return result

    def iter_embeddings(self, depth: int = 0) -> Iterator[Embedding]:
        if depth == len(self.order):
            yield Embedding(images=tuple(self.images))
            return
        x = self.order[depth]
        for w in self._candidates(x):
            self.images[x] = w
            self.used.add(w)
            yield from self.iter_embeddings(depth + 1)
            self.used.discard(w)
            self.images[x] = None


def _is_cover(a: Vertex, b: Vertex) -> bool:
    """b = a | {x} for exactly one x not in a."""
    diff = b ^ a
    return a & b == a and diff != 0 and diff & (diff - 1) == 0


def iter_embeddings(f: Family, p: Pattern) -> Iterator[Embedding]:
    """All embeddings of p into Q_n[f], candidates explored in ascending mask order."""
    check_enumerable(p)
    if p.m > len(f):
        return iter(())
    return _Embedder(f, p).iter_embeddings()


def contains_copy(f: Family, p: Pattern) -> Optional[Embedding]:
    """
    Decide whether Q_n[f] contains a copy of p.

    Args:
        f: The family
        p: An acyclic pattern

    Returns:
        The first witness embedding in ascending-mask search order, or None
        when f is p-free
    """
    witness = next(iter_embeddings(f, p), None)
    logger.debug(f"contains_copy({p.name}, |f|={len(f)}): {'copy' if witness else 'free'}")
    return witness


def count_embeddings(f: Family, p: Pattern) -> int:
    return sum(1 for _ in iter_embeddings(f, p))


def verify_embedding(f: Family, p: Pattern, embedding: Embedding) -> bool:
    """Independent witness check: injective, inside f, every pattern edge a cover step."""
    images = embedding.images
    if len(images) != p.m or len(set(images)) != p.m:
        return False
    if any(v not in f for v in images):
        return False
    return all(_is_cover(images[u], images[v]) for u, v in p.edges)


def longest_directed_path(f: Family) -> tuple[int, list[Vertex]]:
    """
    Longest directed path inside Q_n[f] by dynamic programming in mask order.

    dp[v] = 1 + max dp over in-neighbors of v in f. In-neighbors have
    smaller masks, so members are handled block by block in ascending order,
    by level inside a block. dp keeps one byte per vertex. f is P_k-free iff
    the returned length is at most k-1.

    Returns:
        (number of vertices on the path, the path from bottom to top)
    """
    n = f.n
    if len(f) == 0:
        return 0, []
    dp = np.zeros(f.universe, dtype=np.uint8)
    for members in f.member_blocks():
        levels = np.bitwise_count(members)
        for i in np.unique(levels):
            ms = members[levels == i]
            best = np.zeros(ms.size, dtype=np.uint8)
            for b in range(n):
                has = (ms >> b) & 1 == 1
                if np.any(has):
                    best[has] = np.maximum(best[has], dp[ms[has] ^ (1 << b)])
            dp[ms] = best + 1

    end = int(np.argmax(dp))
    length = int(dp[end])
    path = [end]
    while dp[path[-1]] > 1:
        current = path[-1]
        path.append(next(u for u in in_neighbors(n, current) if dp[u] == dp[current] - 1))
    path.reverse()
    return length, path


def max_out_cover_degree(f: Family) -> tuple[int, Optional[Vertex]]:
    """
    Largest number of out-neighbors inside f over members of f.

    f contains the out-star V_r iff the returned degree is at least r.

    Returns:
        (degree, the smallest-mask member attaining it), or (0, None) for
        the empty family
    """
    best_degree, best_vertex = 0, None
    for members in f.member_blocks():
        if members.size == 0:
            continue
        degree = np.zeros(members.size, dtype=np.uint8)
        for b in range(f.n):
            missing = (members >> b) & 1 == 0
            degree[missing] += f.contains_many(members[missing] | (1 << b))
        top = int(np.argmax(degree))
        if best_vertex is None or degree[top] > best_degree:
            best_degree, best_vertex = int(degree[top]), int(members[top])
    return best_degree, best_vertex


def is_free(f: Family, p: Pattern) -> bool:
    """F-freeness with fast paths for directed paths and out-stars."""
    if is_directed_path(p):
        length, _ = longest_directed_path(f)
        return length < p.m
    leaves = out_star_leaves(p)
    if leaves is not None:
        degree, _ = max_out_cover_degree(f)
        return degree < leaves
    return contains_copy(f, p) is None
