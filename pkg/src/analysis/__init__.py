"""
Analysis
========

The proof engine over chase prefixes:

- multisets: timestamp multisets and their lexicographic order
- tournaments: tournament and loop search, monochromatic extraction
- valleys: witnesses, valley queries, peak removal and edge colouring
- functional: path functionality and the size-4 loop analysis
"""

from .functional import (
    DISCONNECTED,
    SINGLE_MAXIMAL,
    TWO_MAXIMAL,
    FunctionalityResult,
    LoopDerivation,
    defines_tournament,
    path_function_check,
    size4_loop_analysis,
)
from .multisets import Ordering, TimestampMultiset, lex_minimum, mlex_compare, timestamps_of
from .tournaments import (
    MONOCHROMATIC_LIMIT,
    RAMSEY_FACTOR,
    Tournament,
    adjacency,
    edge_graph,
    find_tournament,
    has_loop,
    max_tournament,
    monochromatic_subtournament,
    pair_key,
    ramsey_capacity_note,
)
from .valleys import (
    EdgeColor,
    ValleyDerivation,
    Witness,
    below,
    color_tournament,
    derive_valley,
    is_valley_query,
    maximal_variables,
    minimal_witness,
    peak_removal_step,
    query_graph,
    valley_witness,
    witnesses,
)

__all__ = [
    "DISCONNECTED",
    "SINGLE_MAXIMAL",
    "TWO_MAXIMAL",
    "FunctionalityResult",
    "LoopDerivation",
    "defines_tournament",
    "path_function_check",
    "size4_loop_analysis",
    "Ordering",
    "TimestampMultiset",
    "lex_minimum",
    "mlex_compare",
    "timestamps_of",
    "MONOCHROMATIC_LIMIT",
    "RAMSEY_FACTOR",
    "Tournament",
    "adjacency",
    "edge_graph",
    "find_tournament",
    "has_loop",
    "max_tournament",
    "monochromatic_subtournament",
    "pair_key",
    "ramsey_capacity_note",
    "EdgeColor",
    "ValleyDerivation",
    "Witness",
    "below",
    "color_tournament",
    "derive_valley",
    "is_valley_query",
    "maximal_variables",
    "minimal_witness",
    "peak_removal_step",
    "query_graph",
    "valley_witness",
    "witnesses",
]
