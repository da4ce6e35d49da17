"""Exact zeta-function invariants of graphs and stochastic topological inference."""
from .graph import (
    Graph,
    GraphError,
    build_graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    grid_graph,
    path_graph,
    petersen_graph,
    read_edgelist,
    structure_report,
    write_edgelist,
)

__all__ = [
    "Graph",
    "GraphError",
    "build_graph",
    "complete_graph",
    "cycle_graph",
    "disjoint_union",
    "grid_graph",
    "path_graph",
    "petersen_graph",
    "read_edgelist",
    "structure_report",
    "write_edgelist",
]
