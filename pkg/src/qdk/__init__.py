"""Exact quartet distance and 4-cycle counting toolkit."""

__version__ = "0.1.0"

from .cycles import count_c4_codegree, count_c4_multigraph, count_c4_weighted
from .fast import quartet_distance
from .graph import Multigraph, brute_count_c4, parse_edge_list
from .kernels import BACKEND
from .reduction import bipartize, c4_from_qd, extract_c4, graph_to_trees
from .trees import RootedTree, UnrootedTree, brute_quartet_distance, parse_newick, to_newick

__all__ = [
    "BACKEND",
    "Multigraph",
    "RootedTree",
    "UnrootedTree",
    "bipartize",
    "brute_count_c4",
    "brute_quartet_distance",
    "c4_from_qd",
    "count_c4_codegree",
    "count_c4_multigraph",
    "count_c4_weighted",
    "extract_c4",
    "graph_to_trees",
    "parse_edge_list",
    "parse_newick",
    "quartet_distance",
    "to_newick",
]
