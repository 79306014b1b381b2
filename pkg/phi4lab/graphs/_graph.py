from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Tuple

BOUNDARY_MAX_DEGREE = 1
INTERIOR_MAX_DEGREE = 4


class GraphError(Exception):
    """
    Error raised when a graph violates the structural rules (self-loops, degree bounds)
    """

    def __init__(self, step_name: str = "graph", message: str = "invalid graph"):
        self.step_name = step_name
        self.message = message
        super().__init__(self.message)

    def __str__(self) -> str:
        return "{}: {}".format(self.step_name, self.message)


class Color(str, Enum):
    RED = "red"
    GREEN = "green"


Edge = Tuple[int, int, Color]


def _edge(u: int, v: int, color: Color) -> Edge:
    return (u, v, Color(color)) if u < v else (v, u, Color(color))


@dataclass(frozen=True)
class IbpGraph:
    """A coloured multigraph with k boundary vertices 0..k-1 and interior vertices k..k+l-1.

    Each boundary vertex stands for a factor Phi(x_m)^(1 - deg), each interior vertex for
    :Phi(x_z)^(4 - deg): integrated over the lattice, each edge for a Green kernel C(x_u - x_v).
    The edge tuple is kept sorted so equal graphs compare equal.
    """

    k: int
    interior_count: int = 0
    edges: Tuple[Edge, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.k < 0 or self.interior_count < 0:
            raise GraphError("IbpGraph", "vertex counts must be nonnegative")
        edges = tuple(sorted(_edge(u, v, c) for u, v, c in self.edges))
        object.__setattr__(self, "edges", edges)
        n_vertices = self.k + self.interior_count
        for u, v, _ in edges:
            if u == v:
                raise GraphError("IbpGraph", f"self-loop at vertex {u}")
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise GraphError("IbpGraph", f"edge ({u}, {v}) outside {n_vertices} vertices")
        for vertex, degree in enumerate(self.degrees):
            limit = BOUNDARY_MAX_DEGREE if self.is_boundary(vertex) else INTERIOR_MAX_DEGREE
            if degree > limit:
                raise GraphError("IbpGraph", f"vertex {vertex} has degree {degree} > {limit}")
            if not self.is_boundary(vertex) and degree == 0:
                raise GraphError("IbpGraph", f"interior vertex {vertex} is isolated")

    @property
    def n_vertices(self) -> int:
        return self.k + self.interior_count

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        degrees = [0] * self.n_vertices
        for u, v, _ in self.edges:
            degrees[u] += 1
            degrees[v] += 1
        return tuple(degrees)

    def vertices(self) -> Iterator[int]:
        return iter(range(self.n_vertices))

    def interior_vertices(self) -> Iterator[int]:
        return iter(range(self.k, self.n_vertices))

    def is_boundary(self, vertex: int) -> bool:
        return vertex < self.k

    def insertion_count(self, vertex: int) -> int:
        """Number of Phi factors left at a vertex: 1 - deg (boundary) or 4 - deg (interior)"""
        limit = BOUNDARY_MAX_DEGREE if self.is_boundary(vertex) else INTERIOR_MAX_DEGREE
        return limit - self.degrees[vertex]

    def is_available(self, vertex: int) -> bool:
        return self.insertion_count(vertex) > 0

    def with_edge(self, u: int, v: int, color: Color) -> "IbpGraph":
        return IbpGraph(self.k, self.interior_count, self.edges + (_edge(u, v, color),))

    def with_new_vertex(self, x: int, color: Color = Color.RED) -> Tuple["IbpGraph", int]:
        z = self.n_vertices
        graph = IbpGraph(self.k, self.interior_count + 1, self.edges + (_edge(x, z, color),))
        return graph, z

    def edge_multiset(self, ignore_colors: bool = False) -> dict:
        counts = {}
        for u, v, c in self.edges:
            key = (u, v) if ignore_colors else (u, v, c)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def is_pure(self) -> bool:
        """True for graphs in the class G: every boundary degree 1, every interior degree 4"""
        return all(self.insertion_count(v) == 0 for v in self.vertices())

    def label(self, vertex: int) -> str:
        return f"u{vertex + 1}" if self.is_boundary(vertex) else f"v{vertex - self.k + 1}"


@dataclass(frozen=True)
class Term:
    """coeff * lambda^lambda_power * I_G"""

    coeff: Fraction
    lambda_power: int
    graph: IbpGraph

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if self.lambda_power < 0:
            raise GraphError("Term", "lambda_power must be nonnegative")

    def scaled(self, factor, extra_power: int = 0) -> "Term":
        return Term(self.coeff * factor, self.lambda_power + extra_power, self.graph)

    def with_graph(self, graph: IbpGraph) -> "Term":
        return Term(self.coeff, self.lambda_power, graph)


def initial_graph(k: int) -> IbpGraph:
    """The graph of S^k itself: k boundary vertices and no edge"""
    return IbpGraph(k)


def n_phi(graph: IbpGraph) -> int:
    """n_Phi(G) = 4 l + k - sum_v deg(v)"""
    return 4 * graph.interior_count + graph.k - sum(graph.degrees)
