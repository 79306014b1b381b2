from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import logging
import math
from typing import Dict, Iterable, List, Optional

import networkx as nx

from ._base import IVertexSelector
from ._graph import Color, GraphError, IbpGraph, Term, initial_graph, n_phi
from phi4lab.config import GlobalConfig
from phi4lab.utils import log_decorator

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


class IbpStepError(GraphError):
    """Raised when the chosen vertex carries no Phi insertion to integrate by parts"""


class ExpansionBudgetError(GraphError):
    """Raised when the number of live terms exceeds the configured budget"""


class LowestVertexSelector(IVertexSelector):
    """Lowest-indexed boundary vertex of degree 0, otherwise the lowest interior vertex of degree < 4"""

    def select(self, graph: IbpGraph) -> int:
        for vertex in range(graph.k):
            if graph.is_available(vertex):
                return vertex
        for vertex in graph.interior_vertices():
            if graph.is_available(vertex):
                return vertex
        raise IbpStepError("select", "graph has no available Phi insertion")


class HighestVertexSelector(IVertexSelector):
    """Highest-indexed interior vertex of degree < 4, otherwise the highest boundary vertex of degree 0"""

    def select(self, graph: IbpGraph) -> int:
        for vertex in reversed(range(graph.n_vertices)):
            if graph.is_available(vertex):
                return vertex
        raise IbpStepError("select", "graph has no available Phi insertion")


SELECTORS = {"lowest": LowestVertexSelector, "highest": HighestVertexSelector}


def ibp_step(term: Term, x: int) -> List[Term]:
    """Integrate by parts at vertex x.

    Returns one term per other vertex z with an available insertion (a new green edge {x, z},
    coefficient times the insertion count of z) followed by the term with a new interior vertex
    joined to x by a red edge (coefficient times -1, one more power of lambda).

    Args:
        term (Term): term whose graph carries a Phi insertion at x
        x (int): vertex to integrate by parts at

    Raises:
        IbpStepError: Raised if x has no insertion left (interior degree 4 or boundary degree 1)

    Returns:
        List[Term]: the rewritten terms, summing to the input under I_G
    """
    graph = term.graph
    if not 0 <= x < graph.n_vertices:
        raise IbpStepError("ibp_step", f"vertex {x} not in graph")
    if not graph.is_available(x):
        raise IbpStepError("ibp_step", f"vertex {x} has no Phi insertion (degree {graph.degrees[x]})")
    outputs = []
    for z in graph.vertices():
        if z == x or not graph.is_available(z):
            continue
        outputs.append(Term(term.coeff * graph.insertion_count(z), term.lambda_power, graph.with_edge(x, z, Color.GREEN)))
    grown, _ = graph.with_new_vertex(x, Color.RED)
    outputs.append(Term(-term.coeff, term.lambda_power + 1, grown))
    return outputs


def _refine_classes(graph: IbpGraph, ignore_colors: bool) -> Dict[int, tuple]:
    """Relabeling-invariant colour classes of interior vertices (iterated neighbourhood refinement)"""
    adjacency = {v: [] for v in graph.vertices()}
    for (u, v, *rest), mult in graph.edge_multiset(ignore_colors).items():
        color = "" if ignore_colors else rest[0].value
        adjacency[u].append((v, color, mult))
        adjacency[v].append((u, color, mult))
    signature = {}
    for v in graph.vertices():
        signature[v] = ("B", v) if graph.is_boundary(v) else ("I", graph.degrees[v])
    for _ in range(graph.interior_count):
        refined = {
            v: (signature[v], tuple(sorted((signature[w], c, m) for w, c, m in adjacency[v])))
            for v in graph.vertices()
        }
        # compress to keep signatures small
        ranks = {s: i for i, s in enumerate(sorted(set(refined.values()), key=repr))}
        compressed = {v: (signature[v][0], ranks[refined[v]]) if not graph.is_boundary(v) else signature[v] for v in graph.vertices()}
        if len(set(compressed.values())) == len(set(signature.values())):
            signature = compressed
            break
        signature = compressed
    return {v: signature[v] for v in graph.interior_vertices()}


def canonicalize(graph: IbpGraph, ignore_colors: bool = False) -> str:
    """Key invariant under relabeling of interior vertices and nothing else.

    Boundary vertices keep their identity; edge colours (unless ignored) and multiplicities are
    part of the key. Interior vertices are split into refinement classes and every labeling that
    respects the class order is tried; the lexicographically smallest edge list wins.
    """
    classes = _refine_classes(graph, ignore_colors)
    groups = OrderedDict()
    for v in sorted(classes, key=lambda v: repr(classes[v])):
        groups.setdefault(classes[v], []).append(v)
    group_lists = list(groups.values())

    best = None
    for choice in itertools.product(*(itertools.permutations(g) for g in group_lists)):
        order = [v for perm in choice for v in perm]
        relabel = {v: v for v in range(graph.k)}
        relabel.update({v: graph.k + i for i, v in enumerate(order)})
        edges = []
        for u, v, c in graph.edges:
            a, b = sorted((relabel[u], relabel[v]))
            edges.append((a, b, "" if ignore_colors else c.value[0]))
        edges = tuple(sorted(edges))
        if best is None or edges < best:
            best = edges
    edge_text = ",".join(f"{a}-{b}{c}" for a, b, c in (best or ()))
    return f"k={graph.k};l={graph.interior_count};{edge_text}"


def merge_terms(terms: Iterable[Term], ignore_colors: bool = False) -> List[Term]:
    """Group terms by (canonical key, lambda power), sum coefficients exactly and drop zeros"""
    merged = OrderedDict()
    for term in terms:
        key = (term.lambda_power, canonicalize(term.graph, ignore_colors))
        if key in merged:
            merged[key] = Term(merged[key].coeff + term.coeff, term.lambda_power, merged[key].graph)
        else:
            merged[key] = term
    return [merged[key] for key in sorted(merged) if merged[key].coeff != 0]


def red_forest_check(graph: IbpGraph) -> bool:
    """True iff the red edges form exactly k trees, each holding exactly one boundary vertex"""
    red = nx.MultiGraph()
    red.add_nodes_from(graph.vertices())
    red.add_edges_from((u, v) for u, v, c in graph.edges if c == Color.RED)
    if not nx.is_forest(red):
        return False
    components = list(nx.connected_components(red))
    if len(components) != graph.k:
        return False
    return all(sum(1 for v in component if graph.is_boundary(v)) == 1 for component in components)


def is_connected(graph: IbpGraph) -> bool:
    full = nx.MultiGraph()
    full.add_nodes_from(graph.vertices())
    full.add_edges_from((u, v) for u, v, _ in graph.edges)
    return graph.n_vertices == 0 or nx.is_connected(full)


@dataclass
class Expansion:
    """S^k = sum_{n<=N} lambda^n / n! F_n + lambda^(N+1) R_(N+1).

    `f_terms[n]` holds the raw merged coefficients r'_G, so that sum r'_G I_G is the coefficient of
    lambda^n and F_n = n! sum r'_G I_G.
    """

    k: int
    N: int
    f_terms: Dict[int, List[Term]] = field(default_factory=dict)
    remainder_terms: List[Term] = field(default_factory=list)

    def lambda_coefficient(self, n: int) -> List[Term]:
        return list(self.f_terms.get(n, []))

    def factorial_f(self, n: int) -> List[Term]:
        return [Term(t.coeff * math.factorial(n), t.lambda_power, t.graph) for t in self.f_terms.get(n, [])]

    def connected_terms(self, n: int) -> List[Term]:
        return [t for t in self.f_terms.get(n, []) if is_connected(t.graph)]

    def all_terms(self) -> List[Term]:
        return [t for n in sorted(self.f_terms) for t in self.f_terms[n]] + list(self.remainder_terms)


@log_decorator
def expand(
    k: int,
    N: int,
    max_terms: Optional[int] = None,
    selection_rule: str = "lowest",
    merge: bool = True,
) -> Expansion:
    """Iterate the IBP rewrite until every order <= N graph is a pure Feynman diagram.

    Args:
        k (int): number of boundary points
        N (int): highest order kept in F; remainder graphs carry N+1 interior vertices
        max_terms (int, optional): live-term budget. Defaults to the global config value.
        selection_rule (str, optional): "lowest" or "highest". Defaults to "lowest".
        merge (bool, optional): merge isomorphic terms after each sweep. Defaults to True.

    Raises:
        ValueError: Raised for k < 1, N < -1 or an unknown selection rule
        ExpansionBudgetError: Raised if the live-term count exceeds max_terms

    Returns:
        Expansion: the merged F_n term lists and the remainder terms
    """
    if k < 1 or N < -1:
        raise ValueError(f"expand needs k >= 1 and N >= -1, got k={k}, N={N}")
    if selection_rule not in SELECTORS:
        raise ValueError(f"Unknown selection rule {selection_rule}, use one of {sorted(SELECTORS)}")
    if max_terms is None:
        max_terms = GlobalConfig.get_value_from_config(["expansion", "max_terms"])
    selector = SELECTORS[selection_rule]()
    tidy = merge_terms if merge else list

    expansion = Expansion(k=k, N=N)
    pending = [Term(Fraction(1), 0, initial_graph(k))]
    for level in range(N + 1):
        current, next_level, finished = pending, [], []
        while current:
            sweep = []
            for term in current:
                if n_phi(term.graph) == 0:
                    finished.append(term)
                    continue
                for out in ibp_step(term, selector.select(term.graph)):
                    (next_level if out.lambda_power > level else sweep).append(out)
            current = tidy(sweep)
            next_level = tidy(next_level)
            live = len(current) + len(next_level) + len(finished)
            if live > max_terms:
                raise ExpansionBudgetError("expand", f"{live} live terms at order {level} exceed budget {max_terms}")
        expansion.f_terms[level] = tidy(finished)
        logger.debug(f"k={k} order {level}: {len(expansion.f_terms[level])} F terms, {len(next_level)} carried")
        pending = next_level
    expansion.remainder_terms = tidy(pending)
    logger.debug(f"k={k} N={N}: {len(expansion.remainder_terms)} remainder terms")
    return expansion
