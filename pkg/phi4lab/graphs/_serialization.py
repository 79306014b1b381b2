from fractions import Fraction
import logging
import os
from pathlib import Path
from typing import List, Union

from ._base import IExpansionWriter, IGraphExporter
from ._expansion import Expansion
from ._graph import Color, GraphError, IbpGraph, Term

logger = logging.getLogger(__name__)
logger.setLevel(logging.DEBUG)


class DotExporter(IGraphExporter):
    """Writes an IbpGraph as an undirected DOT graph.

    Boundary vertices are boxes, interior vertices circles; every edge carries its colour.
    Vertices and edges are emitted in index order so the text is stable.
    """

    def __init__(self, name: str = "G"):
        self.name = name

    def export(self, graph: IbpGraph) -> str:
        lines = [f"graph {self.name} {{"]
        for vertex in graph.vertices():
            shape = "box" if graph.is_boundary(vertex) else "circle"
            lines.append(f'  {vertex} [label="{graph.label(vertex)}", shape={shape}];')
        for u, v, color in graph.edges:
            lines.append(f"  {u} -- {v} [color={color.value}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def to_dot(graph: IbpGraph, name: str = "G") -> str:
    return DotExporter(name).export(graph)


class ExpansionTextWriter(IExpansionWriter):
    """Human-readable expansion files.

    ```
    expansion k=2 N=1
    [F0]
    term lambda_power=0 coeff=1/1
      vertices 0:B 1:B
      edges 0-1:green
    [F1]
    [R]
    term lambda_power=2 coeff=-1/1
      ...
    ```
    Sections list F_0..F_N in order followed by the remainder; coefficients are exact "p/q".
    """

    def write(self, expansion: Expansion, path: Union[str, Path]) -> None:
        with open(path, "w") as f:
            f.write(self.dumps(expansion))
        logger.debug(f"Wrote expansion k={expansion.k} N={expansion.N} to {path}")

    def dumps(self, expansion: Expansion) -> str:
        lines = [f"expansion k={expansion.k} N={expansion.N}"]
        for n in range(expansion.N + 1):
            lines.append(f"[F{n}]")
            lines.extend(self._term_lines(term) for term in expansion.f_terms.get(n, []))
        lines.append("[R]")
        lines.extend(self._term_lines(term) for term in expansion.remainder_terms)
        return "\n".join(lines) + "\n"

    @staticmethod
    def _term_lines(term: Term) -> str:
        graph = term.graph
        coeff = Fraction(term.coeff)
        vertices = " ".join(f"{v}:{'B' if graph.is_boundary(v) else 'I'}" for v in graph.vertices())
        edges = " ".join(f"{u}-{v}:{c.value}" for u, v, c in graph.edges)
        return "\n".join(
            [
                f"term lambda_power={term.lambda_power} coeff={coeff.numerator}/{coeff.denominator}",
                f"  vertices {vertices}".rstrip(),
                f"  edges {edges}".rstrip(),
            ]
        )

    def read(self, path: Union[str, Path]) -> Expansion:
        if not os.path.exists(path):
            raise FileNotFoundError(f"Expansion file {path} does not exist")
        with open(path) as f:
            return self.loads(f.read())

    def loads(self, text: str) -> Expansion:
        lines = [line.rstrip() for line in text.splitlines() if line.strip()]
        if not lines or not lines[0].startswith("expansion "):
            raise GraphError("read_expansion", "missing 'expansion k=.. N=..' header")
        header = dict(item.split("=") for item in lines[0].split()[1:])
        expansion = Expansion(k=int(header["k"]), N=int(header["N"]))
        section: List[Term] = None
        pending = None
        for line in lines[1:]:
            if line.startswith("[F"):
                section = expansion.f_terms.setdefault(int(line[2:-1]), [])
            elif line == "[R]":
                section = expansion.remainder_terms
            elif line.startswith("term "):
                fields = dict(item.split("=") for item in line.split()[1:])
                pending = {"lambda_power": int(fields["lambda_power"]), "coeff": Fraction(fields["coeff"])}
            elif line.strip().startswith("vertices"):
                flags = [item.split(":")[1] for item in line.split()[1:]]
                pending["k"] = flags.count("B")
                pending["interior_count"] = flags.count("I")
            elif line.strip().startswith("edges"):
                if section is None or pending is None:
                    raise GraphError("read_expansion", f"edge list outside a term: {line!r}")
                edges = []
                for item in line.split()[1:]:
                    pair, color = item.split(":")
                    u, v = pair.split("-")
                    edges.append((int(u), int(v), Color(color)))
                graph = IbpGraph(pending["k"], pending["interior_count"], tuple(edges))
                section.append(Term(pending["coeff"], pending["lambda_power"], graph))
                pending = None
            else:
                raise GraphError("read_expansion", f"unrecognised line {line!r}")
        for n in range(expansion.N + 1):
            expansion.f_terms.setdefault(n, [])
        return expansion


def write_expansion(expansion: Expansion, path: Union[str, Path]) -> None:
    ExpansionTextWriter().write(expansion, path)


def read_expansion(path: Union[str, Path]) -> Expansion:
    return ExpansionTextWriter().read(path)
