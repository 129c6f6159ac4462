"""
Tournaments and loops over a binary edge predicate.

A tournament here is inclusive: every pair of distinct vertices is joined by
an edge in at least one direction. Finding one of size k is a clique search
in the undirected "some direction" graph, done by branch and bound.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Tuple

import networkx as nx

from ..errors import PreconditionError
from ..model import Instance, Predicate, Term, term_key

logger = logging.getLogger("pawn.tournaments")

MONOCHROMATIC_LIMIT = 12
RAMSEY_FACTOR = 4

Pair = Tuple[Term, Term]


def pair_key(s: Term, t: Term) -> Pair:
    """The unordered pair {s, t} as a canonically ordered tuple"""
    return (s, t) if term_key(s) <= term_key(t) else (t, s)


@dataclass(frozen=True)
class Tournament:
    """
    Vertices that pairwise share an edge, with the edges that were found.

    Attributes:
        vertices: Vertices in canonical order
        arcs: Directed edges between distinct vertices present in the host instance
        predicate: Name of the edge predicate
    """
    vertices: Tuple[Term, ...]
    arcs: FrozenSet[Pair]
    predicate: str = "E"

    @classmethod
    def within(cls, instance: Instance, vertices: Iterable[Term], predicate: str = "E") -> "Tournament":
        members = tuple(sorted(set(vertices), key=term_key))
        inside = set(members)
        arcs = frozenset(
            (a.args[0], a.args[1])
            for a in instance.by_predicate.get(Predicate(predicate, 2), ())
            if a.args[0] in inside and a.args[1] in inside and a.args[0] != a.args[1]
        )
        tournament = cls(members, arcs, predicate)
        if not tournament.is_complete():
            raise PreconditionError(f"{[t.label for t in members]} is not a {predicate}-tournament")
        return tournament

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def pairs(self) -> List[Pair]:
        return [pair_key(s, t) for s, t in itertools.combinations(self.vertices, 2)]

    def has_arc(self, source: Term, target: Term) -> bool:
        return (source, target) in self.arcs

    def orientations(self, s: Term, t: Term) -> List[Pair]:
        """The directed edges joining s and t, forward one first"""
        return [arc for arc in ((s, t), (t, s)) if arc in self.arcs]

    def is_complete(self) -> bool:
        return all(self.orientations(s, t) for s, t in itertools.combinations(self.vertices, 2))

    def restrict(self, vertices: Iterable[Term]) -> "Tournament":
        keep = set(vertices)
        members = tuple(v for v in self.vertices if v in keep)
        return Tournament(members, frozenset(a for a in self.arcs if a[0] in keep and a[1] in keep), self.predicate)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "predicate": self.predicate,
            "size": self.size,
            "vertices": [v.label for v in self.vertices],
            "arcs": sorted([s.label, t.label] for s, t in self.arcs),
        }


def edge_graph(instance: Instance, predicate: str = "E") -> nx.DiGraph:
    """Directed graph of the predicate's atoms; every term of the instance is a node"""
    graph = nx.DiGraph()
    graph.add_nodes_from(sorted(instance.adom, key=term_key))
    for atom in instance.by_predicate.get(Predicate(predicate, 2), ()):
        graph.add_edge(atom.args[0], atom.args[1])
    return graph


def adjacency(instance: Instance, predicate: str = "E") -> nx.Graph:
    """Undirected graph joining distinct terms with an edge in some direction"""
    graph = edge_graph(instance, predicate).to_undirected()
    graph.remove_edges_from(list(nx.selfloop_edges(graph)))
    return graph


def _branch_and_bound(graph: nx.Graph, limit: Optional[int] = None) -> List[Hashable]:
    """
    Largest clique of graph, stopping early once one of size limit is found.

    Vertices are explored in sorted order, so results are deterministic.
    """
    order = sorted(graph.nodes, key=lambda v: term_key(v) if isinstance(v, Term) else v)
    best: List[Hashable] = []

    def search(current: List[Hashable], candidates: List[Hashable]) -> bool:
        nonlocal best
        if len(current) > len(best):
            best = list(current)
            if limit is not None and len(best) >= limit:
                return True
        for i, v in enumerate(candidates):
            # bound: even taking every remaining candidate cannot beat best
            if len(current) + len(candidates) - i <= len(best):
                return False
            extension = [w for w in candidates[i + 1:] if graph.has_edge(v, w)]
            if search(current + [v], extension):
                return True
        return False

    search([], order)
    return best[:limit] if limit is not None else best


def find_tournament(instance: Instance, k: int, predicate: str = "E") -> Optional[Tournament]:
    """
    Some k-vertex tournament among the instance's terms, or None.

    Raises:
        PreconditionError: If k < 1
    """
    if k < 1:
        raise PreconditionError("tournament size must be at least 1")
    clique = _branch_and_bound(adjacency(instance, predicate), k)
    if len(clique) < k:
        return None
    return Tournament.within(instance, clique, predicate)


def max_tournament(instance: Instance, cap: Optional[int] = None, predicate: str = "E") -> Tournament:
    """A maximum-size tournament, or one of size cap if the maximum exceeds cap"""
    if cap is not None and cap < 1:
        raise PreconditionError("tournament cap must be at least 1")
    clique = _branch_and_bound(adjacency(instance, predicate), cap)
    tournament = Tournament.within(instance, clique, predicate)
    logger.debug("largest %s-tournament found has size %d", predicate, tournament.size)
    return tournament


def has_loop(instance: Instance, predicate: str = "E") -> Optional[Term]:
    """The least t with E(t,t) in the instance, or None"""
    loops = [a.args[0] for a in instance.by_predicate.get(Predicate(predicate, 2), ()) if a.args[0] == a.args[1]]
    return min(loops, key=term_key) if loops else None


def _color_of(coloring: Mapping[Pair, Hashable], s: Term, t: Term) -> Hashable:
    for key in ((s, t), (t, s)):
        if key in coloring:
            return coloring[key]
    raise PreconditionError(f"no colour for the pair ({s.label}, {t.label})")


def _color_order(color: Hashable) -> Tuple:
    return (0, color, "") if isinstance(color, int) else (1, 0, repr(color))


def monochromatic_subtournament(
    tournament: Tournament,
    coloring: Mapping[Pair, Hashable],
    size: int,
) -> Optional[Tournament]:
    """
    A sub-tournament of the given size whose pairs all share one colour.

    Colours are tried in sorted order; within a colour the search is exact.

    Args:
        tournament: Host tournament with at most MONOCHROMATIC_LIMIT vertices
        coloring: Colour per pair, keyed by either orientation
        size: Requested number of vertices

    Returns:
        The sub-tournament, or None if no colour admits one
    """
    if tournament.size > MONOCHROMATIC_LIMIT:
        raise PreconditionError(
            f"monochromatic search is exact and limited to {MONOCHROMATIC_LIMIT} vertices, got {tournament.size}"
        )
    if size > tournament.size:
        return None
    if size <= 1:
        return tournament.restrict(tournament.vertices[:size])

    by_color: Dict[Hashable, nx.Graph] = {}
    for s, t in itertools.combinations(tournament.vertices, 2):
        color = _color_of(coloring, s, t)
        by_color.setdefault(color, nx.Graph()).add_edge(s, t)
    for color in sorted(by_color, key=_color_order):
        clique = _branch_and_bound(by_color[color], size)
        if len(clique) >= size:
            logger.debug("monochromatic %d-subtournament in colour %r", size, color)
            return tournament.restrict(clique)
    return None


def ramsey_capacity_note(size: int, palette: int) -> Optional[str]:
    """
    A warning when the tournament is too small for extraction to be guaranteed.

    Exact directed Ramsey numbers are not computed; RAMSEY_FACTOR vertices per
    colour is the threshold below which a failed extraction proves nothing.
    """
    threshold = RAMSEY_FACTOR * max(palette, 1)
    if size >= threshold:
        return None
    return (
        f"tournament of size {size} is below {RAMSEY_FACTOR}x{max(palette, 1)} = {threshold} vertices; "
        "monochromatic extraction is not guaranteed"
    )
