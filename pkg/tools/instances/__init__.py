"""
Problem instances, feasible regions and their file formats.

Provides:
- LinearConstraint, FeasibleRegion, Relation and is_feasible
- ProblemInstance and Sense
- read_instance / write_instance (JSON instance files)
- WeightedGraph and edge-list I/O for the min-cut oracle
"""
from tools.instances.region import (
    Relation,
    LinearConstraint,
    FeasibleRegion,
    is_feasible,
    disjointness_constraints,
    partition_constraints,
    row_constraint,
)
from tools.instances.problem import ProblemInstance, Sense
from tools.instances.io import read_instance, write_instance, dumps_instance, loads_instance
from tools.instances.graphs import WeightedGraph, read_edge_list, parse_edge_list, random_graph

__all__ = [
    "Relation",
    "LinearConstraint",
    "FeasibleRegion",
    "is_feasible",
    "disjointness_constraints",
    "partition_constraints",
    "row_constraint",
    "ProblemInstance",
    "Sense",
    "read_instance",
    "write_instance",
    "dumps_instance",
    "loads_instance",
    "WeightedGraph",
    "read_edge_list",
    "parse_edge_list",
    "random_graph",
]
