"""
Serializers: concrete rule/fact/query syntax, JSON chase traces and DOT graphs.
"""

import json
from typing import Iterable, List, Optional, Union

import pydot
from pydantic import BaseModel, Field

from ..errors import SignatureError
from ..model import CQ, UCQ, Atom, Instance, Rule, RuleSet, term_key
from ..ruleEngine.chase import ChaseTrace


def format_rule(rule: Rule) -> str:
    return str(rule)


def format_rules(rules: Union[RuleSet, Iterable[Rule]], with_ids: bool = False) -> str:
    """One rule per line; with_ids prefixes each rule by a `% <id>` comment line"""
    lines: List[str] = []
    for rule in rules:
        if with_ids:
            lines.append(f"% {rule.id}")
        lines.append(format_rule(rule))
    return "\n".join(lines) + ("\n" if lines else "")


def format_facts(instance: Instance) -> str:
    lines = [f"{atom}." for atom in instance.sorted_atoms() if not atom.is_top]
    return "\n".join(lines) + ("\n" if lines else "")


def format_query(q: CQ) -> str:
    return str(q)


def format_ucq(query: UCQ) -> str:
    return "".join(f"{format_query(q)}\n" for q in query.disjuncts)


class AtomRecord(BaseModel):
    pred: str
    args: List[str] = Field(default_factory=list)

    @classmethod
    def of(cls, atom: Atom) -> "AtomRecord":
        return cls(pred=atom.predicate.name, args=[t.label for t in atom.args])


class StepRecord(BaseModel):
    index: int
    new_atoms: List[AtomRecord]
    triggers: int = 0


class TermRecord(BaseModel):
    name: str
    timestamp: int
    rule: Optional[str] = None
    trigger: Optional[str] = None
    frontier: List[str] = Field(default_factory=list)


class TraceDocument(BaseModel):
    """JSON shape of a chase trace"""
    ruleset: str
    status: str
    saturated_at: Optional[int] = None
    steps: List[StepRecord]
    terms: List[TermRecord]


def trace_document(trace: ChaseTrace) -> TraceDocument:
    steps = [
        StepRecord(
            index=i,
            new_atoms=[AtomRecord.of(a) for a in atoms],
            triggers=len(trace.fired[i]),
        )
        for i, atoms in enumerate(trace.new_atoms)
    ]
    terms = []
    for term in sorted(trace.term_meta, key=term_key):
        meta = trace.term_meta[term]
        terms.append(
            TermRecord(
                name=term.label,
                timestamp=meta.timestamp,
                rule=meta.trigger.rule.id if meta.trigger else None,
                trigger=meta.trigger.identifier if meta.trigger else None,
                frontier=[t.label for t in sorted(meta.frontier, key=term_key)],
            )
        )
    return TraceDocument(
        ruleset=trace.rules.name,
        status=trace.status.value,
        saturated_at=trace.saturated_at,
        steps=steps,
        terms=terms,
    )


def emit_json(trace: ChaseTrace) -> str:
    return trace_document(trace).model_dump_json(indent=2)


def emit_report_json(report: dict) -> str:
    """Stable JSON for plain report dictionaries"""
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)


def emit_dot(source: Union[Instance, ChaseTrace], step: Optional[int] = None, name: str = "instance") -> str:
    """
    DOT graph of an at-most-binary instance, or of one step of a chase trace.

    Terms become nodes, binary atoms edges labelled by predicate, and unary
    atoms annotations on the node label.

    Raises:
        SignatureError: If an atom has arity above 2
    """
    if isinstance(source, ChaseTrace):
        instance = source.steps[source.depth if step is None else step]
    else:
        instance = source
    atoms = instance.sorted_atoms()
    wide = [a for a in atoms if a.predicate.arity > 2]
    if wide:
        raise SignatureError(f"cannot draw {wide[0]}: {wide[0].predicate} is not at most binary")

    annotations = {}
    for atom in atoms:
        if atom.predicate.arity == 1:
            annotations.setdefault(atom.args[0], []).append(atom.predicate.name)

    graph = pydot.Dot(name, graph_type="digraph")
    for term in sorted(instance.adom, key=term_key):
        label = term.label
        if term in annotations:
            label = f"{label}: {','.join(annotations[term])}"
        graph.add_node(pydot.Node(term.label, label=label))
    for atom in atoms:
        if atom.predicate.arity == 2:
            source_term, target_term = atom.args
            graph.add_edge(pydot.Edge(source_term.label, target_term.label, label=atom.predicate.name))
    return graph.to_string()
