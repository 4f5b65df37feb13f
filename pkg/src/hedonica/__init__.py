"""Hedonic games built from friend/enemy orderings: families, preference properties, stability and hardness gadgets."""
from __future__ import annotations

from .families import Family, HedonicGame, canonical_utilities, default_params, make_game
from .model import (Comparison, FriendshipGraph, GraphStats, OrderingProfile, bell, block_index,
                    chordless_four_cycles, distance, friendship_graph, girth, graph_stats, is_bipartite,
                    make_partition, partitions_iter, underlying_graph, validate_partition)
from .properties import (CLAIMS, PropertyReport, Theorem, ToxicitySpec, check_consistency_on_pairs,
                         check_intolerance_in_triangles, check_monotone_on_triangles, check_toxicity,
                         check_triangle_appreciating, toxic, verify_family_contract)
from .reductions import (ExtractionError, Formula, FormulaError, GadgetGame, Reduction, all_satisfying,
                         build_gadget, construct_partition, cycle_gadget, extract_assignment, parse_cnf,
                         random_b2sat, sat_oracle, validate_b2sat)
from .stability import (CapExceeded, Concept, Deviation, StabilityReport, exists_stable,
                        find_blocking_coalition, find_group_deviation, find_single_deviation, is_stable,
                        obtainable, run_dynamics, verify_group_deviation)

__all__ = [
    "CLAIMS",
    "CapExceeded",
    "Comparison",
    "Concept",
    "Deviation",
    "ExtractionError",
    "Family",
    "Formula",
    "FormulaError",
    "FriendshipGraph",
    "GadgetGame",
    "GraphStats",
    "HedonicGame",
    "OrderingProfile",
    "PropertyReport",
    "Reduction",
    "StabilityReport",
    "Theorem",
    "ToxicitySpec",
    "all_satisfying",
    "bell",
    "block_index",
    "build_gadget",
    "canonical_utilities",
    "check_consistency_on_pairs",
    "check_intolerance_in_triangles",
    "check_monotone_on_triangles",
    "check_toxicity",
    "check_triangle_appreciating",
    "chordless_four_cycles",
    "construct_partition",
    "cycle_gadget",
    "default_params",
    "distance",
    "exists_stable",
    "extract_assignment",
    "find_blocking_coalition",
    "find_group_deviation",
    "find_single_deviation",
    "friendship_graph",
    "girth",
    "graph_stats",
    "is_bipartite",
    "is_stable",
    "make_game",
    "make_partition",
    "obtainable",
    "parse_cnf",
    "partitions_iter",
    "random_b2sat",
    "run_dynamics",
    "sat_oracle",
    "toxic",
    "underlying_graph",
    "validate_b2sat",
    "validate_partition",
    "verify_family_contract",
    "verify_group_deviation",
]
__version__ = "0.1.0"
