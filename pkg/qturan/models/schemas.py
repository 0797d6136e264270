from fractions import Fraction
from math import factorial
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
import networkx as nx

from qturan.core.config import get_settings
from qturan.core.hypercube import Family, mask_to_set


def format_set(v: int) -> str:
    """Human notation for a vertex: {1,3,5}, or {} for the empty set."""
    return "{" + ",".join(str(x) for x in mask_to_set(v)) + "}"


class Pattern(BaseModel):
    """A forbidden directed pattern on vertices 0..m-1."""
    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1, description="Number of pattern vertices")
    edges: tuple[tuple[int, int], ...] = Field(default=(), description="Directed edges u->v")
    name: str = Field(default="pattern", description="Display label")
    labels: Optional[tuple[str, ...]] = Field(default=None, description="Vertex names from a QPAT file")

    @model_validator(mode="after")
    def _check_structure(self) -> "Pattern":
        cap = get_settings().MAX_PATTERN_VERTICES
        if self.m > cap:
            raise ValueError(f"pattern has {self.m} vertices, cap is {cap}")
        seen = set()
        for u, v in self.edges:
            if not (0 <= u < self.m and 0 <= v < self.m):
                raise ValueError(f"edge {u}->{v} uses a vertex outside 0..{self.m - 1}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if (u, v) in seen:
                raise ValueError(f"multi-edge {u}->{v}")
            seen.add((u, v))
        if not nx.is_directed_acyclic_graph(self.graph()):
            cycle = nx.find_cycle(self.graph())
            raise ValueError(f"cycle detected: {cycle}")
        if self.labels is not None and len(self.labels) != self.m:
            raise ValueError("one label per pattern vertex required")
        return self

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(self.m))
        g.add_edges_from(self.edges)
        return g

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)


class PatternInfo(BaseModel):
    """Poset data derived from a pattern."""
    model_config = ConfigDict(frozen=True)

    height: int = Field(ge=1)
    is_tree: bool
    is_saturated: Optional[bool] = Field(default=None, description="Only computed for tree posets")
    level_window: tuple[tuple[int, int], ...] = Field(
        description="Per vertex (down_depth, up_height): longest path ending at / starting at it"
    )

    @model_validator(mode="after")
    def _check_window(self) -> "PatternInfo":
        for down, up in self.level_window:
            if down + up - 1 > self.height:
                raise ValueError("level window exceeds height")
        return self


class Embedding(BaseModel):
    """Injective map pattern vertex -> cube vertex; images[x] is the image of x."""
    model_config = ConfigDict(frozen=True)

    images: tuple[int, ...]

    def as_dict(self) -> dict[int, int]:
        return dict(enumerate(self.images))

    def image_mask(self) -> int:
        mask = 0
        for v in self.images:
            mask |= 1 << v
        return mask

    def describe(self, pattern: Pattern) -> list[str]:
        return [f"{pattern.label(x)} -> {format_set(v)}" for x, v in enumerate(self.images)]


class LevelSet(BaseModel):
    """A selection of cube levels."""
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    included: frozenset[int] = frozenset()

    @field_validator("included")
    @classmethod
    def _non_negative(cls, value: frozenset[int]) -> frozenset[int]:
        if any(i < 0 for i in value):
            raise ValueError("levels must be non-negative")
        return value

    @model_validator(mode="after")
    def _within_cube(self) -> "LevelSet":
        bad = sorted(i for i in self.included if i > self.n)
        if bad:
            raise ValueError(f"levels {bad} outside 0..{self.n}")
        return self


class LubellValue(BaseModel):
    """Lubell function as an exact fraction numerator / n!."""
    model_config = ConfigDict(frozen=True)

    n: int
    numerator: int = Field(ge=0)

    @property
    def denominator(self) -> int:
        return factorial(self.n)

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)


class ChainStats(BaseModel):
    """counts[t] = number of maximal chains meeting the family in exactly t sets."""
    model_config = ConfigDict(frozen=True)

    n: int
    counts: tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    def lubell_numerator(self) -> int:
        return sum(t * c for t, c in enumerate(self.counts))

    def fat(self, k: int) -> int:
        return sum(self.counts[max(k, 0):])


class CopyHypergraph(BaseModel):
    """One hyperedge (vertex-set mask) per distinct embedding image in the full cube."""
    model_config = ConfigDict(frozen=True)

    n: int
    pattern: str
    m: int
    edges: tuple[int, ...]

    @model_validator(mode="after")
    def _uniform(self) -> "CopyHypergraph":
        for e in self.edges:
            if e.bit_count() != self.m:
                raise ValueError(f"hyperedge {e:#x} does not have {self.m} vertices")
        return self

    def edge_vertices(self, e: int) -> list[int]:
        return [b for b in range(e.bit_length()) if e >> b & 1]


SearchMethod = Literal["bruteforce", "bnb", "export-only"]


class ExactReport(BaseModel):
    """JSON payload of the exact subcommand."""
    pattern: str
    n: int
    value: int
    exact: bool
    method: str
    nodes: int
    elapsed_ms: int
    witness: list[str]


class SearchResult(BaseModel):
    """Outcome of an exact search: optimum (or best bounds) with an F-free witness."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    pattern: str
    n: int
    value: int
    witness: Family
    method: SearchMethod
    exact: bool
    nodes: int = 0
    elapsed: float = Field(default=0.0, description="Wall time in seconds")
    lower_bound: int
    upper_bound: int

    @model_validator(mode="after")
    def _witness_matches(self) -> "SearchResult":
        if len(self.witness) != self.value:
            raise ValueError("witness size differs from reported value")
        if not self.lower_bound <= self.value <= self.upper_bound:
            raise ValueError("value outside its own bounds")
        return self

    def to_report(self) -> ExactReport:
        return ExactReport(
            pattern=self.pattern,
            n=self.n,
            value=self.value,
            exact=self.exact,
            method=self.method,
            nodes=self.nodes,
            elapsed_ms=int(round(self.elapsed * 1000)),
            witness=[format_set(v) for v in self.witness],
        )


class BoundReport(BaseModel):
    """Lower and upper bounds for ex_v(F, Q_n)."""
    pattern: str
    n: int
    lower: int
    lower_method: str
    upper: int
    upper_method: str
    certified: bool
    vacuous: bool = False


class WcnfStats(BaseModel):
    """Header numbers and clause counts of an exported WCNF instance."""
    nv: int
    nc: int
    top: int
    soft: int
    hard: int


class GrowthRow(BaseModel):
    """One row of the out-star construction growth report."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n: int
    size: int
    excess: int
    ratio: Fraction
