"""
Exact vertex Turan numbers at desk scale.

The search works on the copy hypergraph (one hyperedge per distinct copy
image in the full cube): a vertex set is F-free iff it contains no hyperedge,
so ex_v = 2^n minus the minimum transversal.
"""
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Literal, Optional, TextIO
import logging
import time

import numpy as np
from pysat.formula import WCNF

from qturan.core.config import Settings, get_settings
from qturan.core.exceptions import (
    GuardExceededError,
    InfeasibleMethodError,
    NotFreeError,
    TuranError,
)
from qturan.core.hypercube import Family, check_dim
from qturan.models.schemas import CopyHypergraph, Pattern, SearchResult, WcnfStats
from qturan.services.construct import best_construction
from qturan.services.detect import is_free, iter_embeddings

logger = logging.getLogger(__name__)

Method = Literal["auto", "bruteforce", "bnb"]
CompletionOrder = Literal["ascending", "descending", "random"]


def _mask_of(vertices: Iterable[int]) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def _bits(mask: int) -> list[int]:
    return [b for b in range(mask.bit_length()) if mask >> b & 1]


class _SearchTimeout(Exception):
    pass


class _BranchAndBound:
    """
    Minimum transversal search.

    Branches on the uncovered hyperedge with the fewest undecided vertices;
    child i puts vertex i into the transversal and marks vertices 1..i-1 as
    kept. Hyperedges reduced to one undecided vertex force it in. Pruning
    uses a greedy packing of pairwise disjoint reduced hyperedges.
    """

    def __init__(self, hypergraph: CopyHypergraph, incumbent: int, deadline: float, check_interval: int):
        self.edges = list(hypergraph.edges)
        self.best_transversal = incumbent
        self.best_size = incumbent.bit_count()
        self.deadline = deadline
        self.check_interval = max(check_interval, 1)
        self.nodes = 0
        self.root_bound = self._packing(self.edges)

    @staticmethod
    def _packing(edges: list[int]) -> int:
        used = 0
        count = 0
        for e in sorted(edges, key=int.bit_count):
            if not e & used:
                used |= e
                count += 1
        return count

    def run(self, orbit_dim: Optional[int] = None) -> bool:
        """
        Search to completion; False when the deadline cut it short.

        With orbit_dim = n the root splits over one level of Q_n instead of a
        hyperedge (see _split_on_level).
        """
        try:
            if orbit_dim is None:
                self._search(0, 0, self.edges)
            else:
                self._split_on_level(orbit_dim)
        except _SearchTimeout:
            return False
        return True

    def _split_on_level(self, n: int) -> None:
        """
        Root split over a level, an orbit of the coordinate permutations.

        The copy hypergraph is invariant under those permutations, so if an
        optimal transversal meets the level it can be taken to contain the
        level's smallest mask. Otherwise the whole level is kept.
        """
        incidence = [0] * (n + 1)
        for e in self.edges:
            for v in _bits(e):
                incidence[v.bit_count()] += 1
        target = max(range(n + 1), key=lambda i: (Fraction(incidence[i], comb(n, i)), -i))
        representative = 1 << ((1 << target) - 1)
        whole_level = _mask_of(v for v in range(1 << n) if v.bit_count() == target)
        logger.debug(f"Orbit split on level {target}")
        self._search(representative, 0, self.edges)
        self._search(0, whole_level, self.edges)

    def _search(self, transversal: int, kept: int, edges: list[int]) -> None:
        self.nodes += 1
        if self.nodes % self.check_interval == 0 and time.perf_counter() > self.deadline:
            raise _SearchTimeout()

        while True:
            reduced = []
            forced = 0
            for e in edges:
                if e & transversal:
                    continue
                r = e & ~kept
                if not r:
                    return
                if not r & (r - 1):
                    forced |= r
                reduced.append(r)
            if not forced:
                break
            transversal |= forced
            edges = reduced

        size = transversal.bit_count()
        if size >= self.best_size:
            return
        if not reduced:
            self.best_size = size
            self.best_transversal = transversal
            logger.debug(f"New incumbent transversal of size {size} after {self.nodes} nodes")
            return
        if size + self._packing(reduced) >= self.best_size:
            return

        pick = min(reduced, key=int.bit_count)
        choices = [1 << b for b in _bits(pick)]
        coverage = {v: sum(1 for r in reduced if r & v) for v in choices}
        choices.sort(key=lambda v: -coverage[v])
        excluded = 0
        for v in choices:
            self._search(transversal | v, kept | excluded, reduced)
            excluded |= v


class TuranSolver:
    """Copy enumeration, exact search, greedy completion and MaxSAT export."""

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def enumerate_copies(self, n: int, p: Pattern) -> CopyHypergraph:
        """
        Hypergraph of all copy images of p in the full cube Q_n.

        Raises:
            GuardExceededError: If n is over MAX_ENUM_DIM or the number of
                distinct images passes MAX_COPY_EDGES
        """
        n = check_dim(n)
        if n > self.settings.MAX_ENUM_DIM:
            raise GuardExceededError(f"Copy enumeration is limited to n <= {self.settings.MAX_ENUM_DIM}, got n={n}")
        images: dict[int, None] = {}
        for embedding in iter_embeddings(Family.full(n), p):
            images[embedding.image_mask()] = None
            if len(images) > self.settings.MAX_COPY_EDGES:
                raise GuardExceededError(
                    f"More than {self.settings.MAX_COPY_EDGES} copies of {p.name} in Q_{n}"
                )
        hypergraph = CopyHypergraph(n=n, pattern=p.name, m=p.m, edges=tuple(sorted(images)))
        logger.info(f"Enumerated {len(hypergraph.edges)} copies of {p.name} in Q_{n}")
        return hypergraph

    def _bruteforce(self, hypergraph: CopyHypergraph) -> tuple[int, int]:
        """Scan vertex subsets by decreasing size; the first F-free one is optimal."""
        universe = 1 << hypergraph.n
        nodes = 0
        for size in range(universe, -1, -1):
            for combo in combinations(range(universe), size):
                nodes += 1
                kept = 0
                for v in combo:
                    kept |= 1 << v
                if not any(e & kept == e for e in hypergraph.edges):
                    return kept, nodes
        raise TuranError("Brute force found no F-free subset")

    def _initial_transversal(self, n: int, p: Pattern, hypergraph: CopyHypergraph) -> int:
        everything = (1 << (1 << n)) - 1
        try:
            construction, method = best_construction(n, p, verify=False)
        except TuranError as e:
            logger.warning(f"No construction incumbent for {p.name} at n={n}: {e}")
            return everything
        transversal = everything ^ _mask_of(construction)
        if any(not e & transversal for e in hypergraph.edges):
            logger.warning(f"Construction {method} is not a transversal complement; starting from scratch")
            return everything
        logger.info(f"Incumbent from {method}: keeps {len(construction)} vertices")
        return transversal

    def exact_exv(
        self,
        n: int,
        p: Pattern,
        method: Method = "auto",
        timeout: Optional[float] = None,
        orbit_branching: Optional[bool] = None,
    ) -> SearchResult:
        """
        Compute ex_v(p, Q_n) exactly.

        Args:
            n: Cube dimension
            p: The forbidden pattern
            method: 'bruteforce' (2^n <= BRUTEFORCE_MAX_VERTICES), 'bnb', or
                'auto' to pick brute force whenever it is allowed
            timeout: Seconds before branch and bound gives up (settings default)
            orbit_branching: Split the branch and bound root over a cube level
                (settings default SOLVER_ORBIT_BRANCHING)

        Returns:
            SearchResult with a re-verified F-free witness; exact=False with
            the incumbent as value when the search timed out

        Raises:
            InfeasibleMethodError: If the method cannot run on these parameters
            GuardExceededError: If copy enumeration is too large
        """
        n = check_dim(n)
        universe = 1 << n
        if method == "auto":
            method = "bruteforce" if universe <= self.settings.BRUTEFORCE_MAX_VERTICES else "bnb"
        if method not in ("bruteforce", "bnb"):
            raise InfeasibleMethodError(f"Unknown search method '{method}'")
        if method == "bruteforce" and universe > self.settings.BRUTEFORCE_MAX_VERTICES:
            raise InfeasibleMethodError(
                f"Brute force needs 2^n <= {self.settings.BRUTEFORCE_MAX_VERTICES}, got n={n}"
            )

        logger.info(f"Solving ex_v({p.name}, Q_{n}) by {method}")
        start = time.perf_counter()
        hypergraph = self.enumerate_copies(n, p)

        if method == "bruteforce":
            kept, nodes = self._bruteforce(hypergraph)
            exact = True
            value = kept.bit_count()
            lower, upper = value, value
        else:
            timeout = self.settings.SOLVER_TIMEOUT_SECONDS if timeout is None else timeout
            search = _BranchAndBound(
                hypergraph,
                incumbent=self._initial_transversal(n, p, hypergraph),
                deadline=start + timeout,
                check_interval=self.settings.SOLVER_TIMEOUT_CHECK_INTERVAL,
            )
            if orbit_branching is None:
                orbit_branching = self.settings.SOLVER_ORBIT_BRANCHING
            exact = search.run(orbit_dim=n if orbit_branching else None)
            nodes = search.nodes
            kept = ((1 << universe) - 1) ^ search.best_transversal
            value = kept.bit_count()
            lower = value
            upper = value if exact else universe - search.root_bound
            if not exact:
                logger.warning(
                    f"Timed out after {timeout}s and {nodes} nodes: {lower} <= ex_v <= {upper}"
                )

        witness = Family.from_masks(n, _bits(kept))
        if not is_free(witness, p):
            logger.error(f"Witness for {p.name} at n={n} failed re-verification")
            raise TuranError(f"Search produced a witness containing {p.name}")

        elapsed = time.perf_counter() - start
        if exact:
            logger.info(f"✅ ex_v({p.name}, Q_{n}) = {value} ({method}, {nodes} nodes, {elapsed:.2f}s)")
        return SearchResult(
            pattern=p.name,
            n=n,
            value=value,
            witness=witness,
            method=method,
            exact=exact,
            nodes=nodes,
            elapsed=elapsed,
            lower_bound=lower,
            upper_bound=upper,
        )

    def complete_to_maximal(
        self,
        f: Family,
        p: Pattern,
        order: CompletionOrder = "ascending",
        seed: Optional[int] = None,
    ) -> Family:
        """
        Greedily grow an F-free family until no single vertex can be added.

        One pass suffices: the family only grows, so a vertex rejected once
        stays rejected.

        Raises:
            NotFreeError: If f already contains a copy of p
        """
        if not is_free(f, p):
            raise NotFreeError(f"Input family already contains {p.name}")
        universe = f.universe
        if order == "ascending":
            sequence = range(universe)
        elif order == "descending":
            sequence = range(universe - 1, -1, -1)
        elif order == "random":
            seed = self.settings.DEFAULT_SEED if seed is None else seed
            sequence = np.random.default_rng(seed).permutation(universe).tolist()
        else:
            raise InfeasibleMethodError(f"Unknown completion order '{order}'")

        hypergraph = self.enumerate_copies(f.n, p)
        incident: dict[int, list[int]] = {v: [] for v in range(universe)}
        for e in hypergraph.edges:
            for v in hypergraph.edge_vertices(e):
                incident[v].append(e)

        kept = _mask_of(f)
        for v in sequence:
            if kept >> v & 1:
                continue
            candidate = kept | (1 << v)
            if all(e & candidate != e for e in incident[v]):
                kept = candidate
        result = Family.from_masks(f.n, _bits(kept))
        logger.info(f"Completed {p.name}-free family from {len(f)} to {len(result)} ({order})")
        return result

    def export_wcnf(self, n: int, p: Pattern, sink: TextIO) -> WcnfStats:
        """
        Write the MaxSAT instance whose optimum is ex_v(p, Q_n), classic
        "p wcnf nv nc top" layout with hard clauses weighted top.

        Variable v+1 selects vertex v; one soft unit clause per vertex and one
        hard clause per copy forbidding all of its vertices at once.
        """
        hypergraph = self.enumerate_copies(n, p)
        wcnf = WCNF()
        for v in range(1 << hypergraph.n):
            wcnf.append([v + 1], weight=1)
        for e in hypergraph.edges:
            wcnf.append([-(v + 1) for v in hypergraph.edge_vertices(e)])
        wcnf.to_fp(sink, format="legacy")
        stats = WcnfStats(
            nv=wcnf.nv,
            nc=len(wcnf.soft) + len(wcnf.hard),
            top=wcnf.topw,
            soft=len(wcnf.soft),
            hard=len(wcnf.hard),
        )
        logger.info(f"Exported WCNF for {p.name} at n={n}: {stats.soft} soft, {stats.hard} hard")
        return stats


# Singleton instance
_solver_service = None


def get_solver_service() -> TuranSolver:
    """Get or create the solver service instance."""
    global _solver_service
    try:
        if _solver_service is None:
            logger.info("Initializing solver service")
            _solver_service = TuranSolver()
        return _solver_service
    except Exception as e:
        logger.error(f"Failed to initialize solver service: {str(e)}", exc_info=True)
        raise


def enumerate_copies(n: int, p: Pattern) -> CopyHypergraph:
    return get_solver_service().enumerate_copies(n, p)


def exact_exv(
    n: int,
    p: Pattern,
    method: Method = "auto",
    timeout: Optional[float] = None,
    orbit_branching: Optional[bool] = None,
) -> SearchResult:
    return get_solver_service().exact_exv(n, p, method=method, timeout=timeout, orbit_branching=orbit_branching)


def complete_to_maximal(
    f: Family, p: Pattern, order: CompletionOrder = "ascending", seed: Optional[int] = None
) -> Family:
    return get_solver_service().complete_to_maximal(f, p, order=order, seed=seed)


def export_wcnf(n: int, p: Pattern, sink: TextIO) -> WcnfStats:
    return get_solver_service().export_wcnf(n, p, sink)
