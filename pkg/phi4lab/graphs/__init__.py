"""
Module for the symbolic Dyson-Schwinger expansion: coloured multigraphs with boundary and interior vertices,
the integration-by-parts rewrite, the full expansion of the k-point function to order N, and the plumbing
that keeps it exact and readable (canonical keys, rational merging, text and DOT output).

### Types
- IbpGraph: coloured multigraph with k boundary vertices and l interior vertices
- Term: exact rational coefficient * lambda^n * I_G
- Expansion: the F_n term lists and the remainder terms of one expansion

### Operations
- n_phi, initial_graph, ibp_step, expand
- canonicalize, merge_terms, red_forest_check
- to_dot, write_expansion, read_expansion
"""
from ._graph import Color, IbpGraph, Term, GraphError, initial_graph, n_phi
from ._expansion import (
    Expansion,
    ExpansionBudgetError,
    IbpStepError,
    LowestVertexSelector,
    HighestVertexSelector,
    ibp_step,
    expand,
    canonicalize,
    merge_terms,
    red_forest_check,
    is_connected,
)
from ._serialization import DotExporter, ExpansionTextWriter, to_dot, write_expansion, read_expansion


__all__ = [
    Color,
    IbpGraph,
    Term,
    GraphError,
    initial_graph,
    n_phi,
    Expansion,
    ExpansionBudgetError,
    IbpStepError,
    LowestVertexSelector,
    HighestVertexSelector,
    ibp_step,
    expand,
    canonicalize,
    merge_terms,
    red_forest_check,
    is_connected,
    DotExporter,
    ExpansionTextWriter,
    to_dot,
    write_expansion,
    read_expansion,
]
