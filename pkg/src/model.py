"""
Core model: terms, atoms, instances, rules and queries.

Every value here is immutable after construction, so instances, rule sets and
queries can be shared freely between pipeline stages. Homomorphisms fix
constants pointwise; variables (in rules and queries) and labelled nulls (in
chase output) are the mappable terms.
"""

import itertools
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple


class TermKind(Enum):
    CONSTANT = "constant"
    NULL = "null"
    VARIABLE = "variable"


_KIND_ORDER = {TermKind.CONSTANT: 0, TermKind.NULL: 1, TermKind.VARIABLE: 2}
_DIGITS = re.compile(r"(\d+)")


def _natural_key(label: str) -> Tuple:
    return tuple(int(part) if part.isdigit() else part for part in _DIGITS.split(label))


@dataclass(frozen=True)
class Term:
    """
    A constant, variable or labelled null.

    Attributes:
        kind: Which of the three term sorts this is
        label: Identifier, unique per kind
        birth: Chase step that created a null (not part of identity)
        trigger_id: Identity of the trigger that created a null (not part of identity)
    """
    kind: TermKind
    label: str
    birth: Optional[int] = field(default=None, compare=False)
    trigger_id: Optional[str] = field(default=None, compare=False)

    @classmethod
    def constant(cls, label: str) -> "Term":
        return cls(TermKind.CONSTANT, label)

    @classmethod
    def variable(cls, label: str) -> "Term":
        return cls(TermKind.VARIABLE, label)

    @classmethod
    def null(cls, label: str, birth: Optional[int] = None, trigger_id: Optional[str] = None) -> "Term":
        return cls(TermKind.NULL, label, birth, trigger_id)

    @property
    def is_constant(self) -> bool:
        return self.kind is TermKind.CONSTANT

    @property
    def is_variable(self) -> bool:
        return self.kind is TermKind.VARIABLE

    @property
    def is_null(self) -> bool:
        return self.kind is TermKind.NULL

    @property
    def sort_key(self) -> Tuple:
        return (_KIND_ORDER[self.kind], _natural_key(self.label))

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"{self.kind.value}:{self.label}"


def term_key(term: Term) -> Tuple:
    return term.sort_key


@dataclass(frozen=True)
class Predicate:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


TOP_PREDICATE = Predicate("true", 0)


@dataclass(frozen=True)
class Atom:
    """A predicate applied to a tuple of terms"""
    predicate: Predicate
    args: Tuple[Term, ...]

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.predicate.arity:
            raise ValueError(
                f"{self.predicate.name} expects {self.predicate.arity} arguments, got {len(self.args)}"
            )

    @classmethod
    def of(cls, name: str, *args: Term) -> "Atom":
        return cls(Predicate(name, len(args)), tuple(args))

    @property
    def is_top(self) -> bool:
        return self.predicate == TOP_PREDICATE

    @property
    def terms(self) -> FrozenSet[Term]:
        return frozenset(self.args)

    @property
    def variables(self) -> FrozenSet[Term]:
        return frozenset(t for t in self.args if t.is_variable)

    @property
    def sort_key(self) -> Tuple:
        return (self.predicate.name, self.predicate.arity, tuple(t.sort_key for t in self.args))

    def __str__(self) -> str:
        if self.is_top:
            return "true"
        return f"{self.predicate.name}({','.join(t.label for t in self.args)})"


TOP = Atom(TOP_PREDICATE, ())


def atom_key(atom: Atom) -> Tuple:
    return atom.sort_key


def sorted_atoms(atoms: Iterable[Atom]) -> List[Atom]:
    return sorted(atoms, key=atom_key)


def terms_of(atoms: Iterable[Atom]) -> FrozenSet[Term]:
    return frozenset(t for a in atoms for t in a.args)


def signature_of(atoms: Iterable[Atom]) -> FrozenSet[Predicate]:
    return frozenset(a.predicate for a in atoms if not a.is_top)


@dataclass(frozen=True)
class Instance:
    """
    A finite set of atoms that always contains the nullary fact true.

    The signature excludes the true predicate; the active domain is the set
    of terms occurring in the atoms.
    """
    atoms: FrozenSet[Atom] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "atoms", frozenset(self.atoms) | {TOP})

    @classmethod
    def of(cls, *atoms: Atom) -> "Instance":
        return cls(frozenset(atoms))

    def __iter__(self) -> Iterator[Atom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self.atoms

    @cached_property
    def adom(self) -> FrozenSet[Term]:
        return terms_of(self.atoms)

    @cached_property
    def signature(self) -> FrozenSet[Predicate]:
        return signature_of(self.atoms)

    @cached_property
    def by_predicate(self) -> Dict[Predicate, Tuple[Atom, ...]]:
        index: Dict[Predicate, List[Atom]] = {}
        for atom in sorted_atoms(self.atoms):
            index.setdefault(atom.predicate, []).append(atom)
        return {p: tuple(atoms) for p, atoms in index.items()}

    def sorted_atoms(self) -> List[Atom]:
        return sorted_atoms(self.atoms)

    def restrict(self, signature: Iterable[Predicate]) -> "Instance":
        keep = frozenset(signature)
        return Instance(frozenset(a for a in self.atoms if a.predicate in keep))

    def union(self, atoms: Iterable[Atom]) -> "Instance":
        return Instance(self.atoms | frozenset(atoms))

    def thawed(self) -> "Instance":
        """Replace every constant by a null of the same label"""
        mapping = {t: Term.null(t.label) for t in self.adom if t.is_constant}
        return Instance(frozenset(apply_substitution(a, mapping) for a in self.atoms))

    @property
    def is_trivial(self) -> bool:
        return self.atoms == frozenset({TOP})


def _dedupe(atoms: Iterable[Atom]) -> Tuple[Atom, ...]:
    return tuple(dict.fromkeys(atoms))


@dataclass(frozen=True)
class Rule:
    """
    An existential rule B(x̄,ȳ) → ∃z̄ H(ȳ,z̄).

    Attributes:
        id: Identifier, unique within a rule set
        body: Body atoms over variables
        head: Head atoms over variables
    """
    id: str
    body: Tuple[Atom, ...]
    head: Tuple[Atom, ...]

    def __post_init__(self):
        object.__setattr__(self, "body", _dedupe(self.body))
        object.__setattr__(self, "head", _dedupe(self.head))
        if not self.body:
            raise ValueError(f"rule {self.id} has an empty body")
        if not self.head:
            raise ValueError(f"rule {self.id} has an empty head")
        for atom in self.body + self.head:
            if any(not t.is_variable for t in atom.args):
                raise ValueError(f"rule {self.id} contains a non-variable term in {atom}")

    @cached_property
    def body_variables(self) -> FrozenSet[Term]:
        return terms_of(self.body)

    @cached_property
    def head_variables(self) -> FrozenSet[Term]:
        return terms_of(self.head)

    @cached_property
    def frontier(self) -> FrozenSet[Term]:
        return self.body_variables & self.head_variables

    @cached_property
    def existentials(self) -> FrozenSet[Term]:
        return self.head_variables - self.body_variables

    @property
    def variables(self) -> FrozenSet[Term]:
        return self.body_variables | self.head_variables

    @property
    def is_datalog(self) -> bool:
        return not self.existentials

    @cached_property
    def signature(self) -> FrozenSet[Predicate]:
        return signature_of(self.body + self.head)

    def with_id(self, rule_id: str) -> "Rule":
        return Rule(rule_id, self.body, self.head)

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.body)
        head = ", ".join(str(a) for a in self.head)
        if self.existentials:
            names = ",".join(t.label for t in sorted(self.existentials, key=term_key))
            return f"{body} -> ? {names} : {head} ."
        return f"{body} -> {head} ."


@dataclass(frozen=True)
class RuleSet:
    """An ordered collection of rules with unique ids"""
    rules: Tuple[Rule, ...] = ()
    name: str = "R"

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        ids = [r.id for r in self.rules]
        if len(ids) != len(set(ids)):
            raise ValueError(f"duplicate rule ids in {self.name}")

    def __iter__(self) -> Iterator[Rule]:
        return iter(self.rules)

    def __len__(self) -> int:
        return len(self.rules)

    @cached_property
    def signature(self) -> FrozenSet[Predicate]:
        return frozenset(p for r in self.rules for p in r.signature)

    def get(self, rule_id: str) -> Rule:
        for rule in self.rules:
            if rule.id == rule_id:
                return rule
        raise KeyError(rule_id)

    @property
    def datalog_rules(self) -> Tuple[Rule, ...]:
        return tuple(r for r in self.rules if r.is_datalog)

    @property
    def existential_rules(self) -> Tuple[Rule, ...]:
        return tuple(r for r in self.rules if not r.is_datalog)

    def with_rules(self, extra: Iterable[Rule], name: Optional[str] = None) -> "RuleSet":
        return RuleSet(self.rules + tuple(extra), name or self.name)


def is_specialization(candidate: Sequence[Term], base: Sequence[Term]) -> bool:
    """True iff candidate is compatible with base and only merges its positions"""
    if len(candidate) != len(base):
        return False
    n = len(base)
    for i in range(n):
        for j in range(n):
            if base[i] == base[j] and candidate[i] != candidate[j]:
                return False
    for i in range(n):
        if candidate[i] == base[i]:
            continue
        if not any(candidate[i] == candidate[j] == base[j] for j in range(n)):
            return False
    return True


@dataclass(frozen=True)
class CQ:
    """
    A conjunctive query ∃z̄ φ(x̄, z̄) with answer tuple x̄.

    Attributes:
        atoms: Query atoms (nonempty)
        answer_vars: Answer tuple; repeated variables are allowed
    """
    atoms: Tuple[Atom, ...]
    answer_vars: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", _dedupe(self.atoms))
        object.__setattr__(self, "answer_vars", tuple(self.answer_vars))
        if not self.atoms:
            raise ValueError("a conjunctive query needs at least one atom")
        occurring = terms_of(self.atoms)
        for v in self.answer_vars:
            if not v.is_variable:
                raise ValueError(f"answer term {v!r} is not a variable")
            if v not in occurring:
                raise ValueError(f"answer variable {v} does not occur in the query atoms")

    @property
    def arity(self) -> int:
        return len(self.answer_vars)

    @property
    def is_boolean(self) -> bool:
        return not self.answer_vars

    @cached_property
    def variables(self) -> FrozenSet[Term]:
        return frozenset(t for t in terms_of(self.atoms) if t.is_variable)

    @cached_property
    def existential_vars(self) -> FrozenSet[Term]:
        return self.variables - frozenset(self.answer_vars)

    @cached_property
    def signature(self) -> FrozenSet[Predicate]:
        return signature_of(self.atoms)

    def substitute(self, mapping: Mapping[Term, Term]) -> "CQ":
        return CQ(
            tuple(apply_substitution(a, mapping) for a in self.atoms),
            tuple(mapping.get(v, v) for v in self.answer_vars),
        )

    def __str__(self) -> str:
        answers = ",".join(v.label for v in self.answer_vars)
        return f"?({answers}) <- {', '.join(str(a) for a in self.atoms)}."


@dataclass(frozen=True)
class UCQ:
    """A union of CQs whose answer tuples specialize a common tuple"""
    disjuncts: Tuple[CQ, ...]
    answer_vars: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))
        object.__setattr__(self, "answer_vars", tuple(self.answer_vars))
        for q in self.disjuncts:
            if not is_specialization(q.answer_vars, self.answer_vars):
                raise ValueError(f"answer tuple of {q} does not specialize {self.answer_vars}")

    @classmethod
    def single(cls, q: CQ) -> "UCQ":
        return cls((q,), q.answer_vars)

    def __iter__(self) -> Iterator[CQ]:
        return iter(self.disjuncts)

    def __len__(self) -> int:
        return len(self.disjuncts)

    @property
    def arity(self) -> int:
        return len(self.answer_vars)


def apply_substitution(atom: Atom, sigma: Mapping[Term, Term]) -> Atom:
    """Replace every non-constant argument in the domain of sigma by its image"""
    if not sigma:
        return atom
    return Atom(atom.predicate, tuple(t if t.is_constant else sigma.get(t, t) for t in atom.args))


def set_partitions(items: Sequence) -> Iterator[List[List]]:
    """Yield every partition of items, the partition into singletons first"""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for partition in set_partitions(rest):
        yield [[first]] + partition
        for i in range(len(partition)):
            yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]


def specializations(t: Sequence[Term]) -> List[Tuple[Term, ...]]:
    """
    Every specialization of the variable tuple t, t itself first.

    A specialization applies an idempotent map on the distinct variables of t:
    each variable is sent to a representative that is itself fixed.
    """
    distinct = list(dict.fromkeys(t))
    seen: Dict[Tuple[Term, ...], None] = {}
    for partition in set_partitions(distinct):
        for representatives in itertools.product(*partition):
            image = {}
            for block, rep in zip(partition, representatives):
                for v in block:
                    image[v] = rep
            seen.setdefault(tuple(image[v] for v in t), None)
    return list(seen)


class FreshNames:
    """Allocate labels prefix1, prefix2, ... skipping labels already in use"""

    def __init__(self, used: Iterable[str] = (), prefix: str = "_n", start: int = 1):
        self.used = set(used)
        self.prefix = prefix
        self.counter = start

    def __call__(self) -> str:
        while f"{self.prefix}{self.counter}" in self.used:
            self.counter += 1
        label = f"{self.prefix}{self.counter}"
        self.used.add(label)
        self.counter += 1
        return label


class FreshPredicates:
    """Allocate predicate names disjoint from a signature"""

    def __init__(self, signature: Iterable[Predicate] = ()):
        self.used = {p.name for p in signature} | {TOP_PREDICATE.name}
        self.allocated: List[Predicate] = []

    def __call__(self, base: str, arity: int) -> Predicate:
        name, k = base, 2
        while name in self.used:
            name = f"{base}_{k}"
            k += 1
        self.used.add(name)
        predicate = Predicate(name, arity)
        self.allocated.append(predicate)
        return predicate


def disjoint_union_with_renaming(first: Instance, second: Instance) -> Tuple[Instance, Dict[Term, Term]]:
    fresh = FreshNames(t.label for t in first.adom | second.adom)
    renaming = {t: Term.null(fresh()) for t in sorted(second.adom, key=term_key)}
    renamed = frozenset(
        Atom(a.predicate, tuple(renaming[t] for t in a.args)) for a in second.atoms
    )
    return Instance(first.atoms | renamed), renaming


def disjoint_union(first: Instance, second: Instance) -> Instance:
    """first ∪ σ(second) for a renaming σ of every term of second to fresh nulls"""
    return disjoint_union_with_renaming(first, second)[0]
