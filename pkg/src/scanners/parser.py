"""
Parsers for rule, fact and query files.

Identifier convention: predicate names start uppercase; terms start with a
lowercase letter, a digit or an underscore. In rule and query context a term
is a variable, in fact context a constant. `%` starts a comment.

The lexer is contextual, so an uppercase identifier in argument position is
read as a term and rejected afterwards with a precise message.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from ..errors import ArityConflictError, ParseError, SourceSpan
from ..model import (
    CQ,
    TOP,
    UCQ,
    Atom,
    FreshNames,
    Instance,
    Predicate,
    Rule,
    RuleSet,
    Term,
    apply_substitution,
)

GRAMMAR = r"""
rules_file: rule*
rule: [atomlist] ARROW head "."
head: [existentials] [atomlist]
existentials: "?" varlist ":"

facts_file: fact*
fact: atom "."

query_file: query
ucq_file: query+
query: "?" "(" [varlist] ")" "<-" atomlist "."

varlist: TERM ("," TERM)*
atomlist: atom ("," atom)*
atom: PRED "(" [termlist] ")"   -> predicate_atom
    | TRUE                      -> top_atom
termlist: TERM ("," TERM)*

ARROW: "->"
TRUE: "true"
PRED: /[A-Z][A-Za-z0-9_]*/
TERM: /[A-Za-z0-9_][A-Za-z0-9_']*/
COMMENT: /%[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_PARSER = Lark(
    GRAMMAR,
    parser="lalr",
    start=["rules_file", "facts_file", "query_file", "ucq_file"],
    maybe_placeholders=True,
)


@dataclass
class _RawAtom:
    predicate: Optional[Token]
    args: List[Token]
    anchor: Token


@dataclass
class _RawRule:
    body: Optional[List[_RawAtom]]
    arrow: Token
    existentials: Optional[List[Token]]
    head: Optional[List[_RawAtom]]


@dataclass
class _RawQuery:
    answers: List[Token]
    atoms: List[_RawAtom]


class _RawTree(Transformer):
    def predicate_atom(self, items):
        predicate, terms = items
        return _RawAtom(predicate, list(terms or []), predicate)

    def top_atom(self, items):
        return _RawAtom(None, [], items[0])

    def termlist(self, items):
        return list(items)

    def varlist(self, items):
        return list(items)

    def atomlist(self, items):
        return list(items)

    def existentials(self, items):
        return items[0]

    def head(self, items):
        return items[0], items[1]

    def rule(self, items):
        body, arrow, (existentials, head) = items
        return _RawRule(body, arrow, existentials, head)

    def fact(self, items):
        return items[0]

    def query(self, items):
        answers, atoms = items
        return _RawQuery(list(answers or []), atoms)

    def rules_file(self, items):
        return list(items)

    def facts_file(self, items):
        return list(items)

    def query_file(self, items):
        return items[0]

    def ucq_file(self, items):
        return list(items)


def _end_span(text: str, file: str) -> SourceSpan:
    lines = text.split("\n")
    return SourceSpan(file, len(lines), len(lines[-1]) + 1)


def _parse_tree(text: str, start: str, file: str):
    try:
        tree = _PARSER.parse(text, start=start)
    except UnexpectedEOF as e:
        raise ParseError("syntax error: unexpected end of input", _end_span(text, file)) from e
    except UnexpectedToken as e:
        if e.token.type == "$END":
            raise ParseError("syntax error: unexpected end of input", _end_span(text, file)) from e
        raise ParseError(
            f"syntax error: unexpected {e.token.value!r}", SourceSpan(file, max(e.line, 1), max(e.column, 1))
        ) from e
    except UnexpectedCharacters as e:
        raise ParseError(
            f"syntax error: unexpected character {e.char!r}", SourceSpan(file, max(e.line, 1), max(e.column, 1))
        ) from e
    except UnexpectedInput as e:
        raise ParseError("syntax error", SourceSpan(file, max(e.line, 1), max(e.column, 1))) from e
    return _RawTree().transform(tree)


class _Builder:
    """Turns raw parse results into model objects, tracking predicate arities"""

    def __init__(self, file: str):
        self.file = file
        self.arities: Dict[str, int] = {}

    def span(self, token: Token) -> SourceSpan:
        return SourceSpan(self.file, token.line, token.column)

    def predicate(self, token: Token, arity: int) -> Predicate:
        name = str(token)
        known = self.arities.setdefault(name, arity)
        if known != arity:
            raise ArityConflictError(
                f"predicate {name} used with arity {arity} after arity {known}", self.span(token)
            )
        return Predicate(name, arity)

    def atom(self, raw: _RawAtom, ground: bool) -> Atom:
        if raw.predicate is None:
            return TOP
        args = []
        for token in raw.args:
            if ground:
                if token[0].isupper():
                    raise ParseError(f"variable {token} in a fact", self.span(token))
                args.append(Term.constant(str(token)))
            else:
                if token[0].isupper():
                    raise ParseError(f"term {token} must start lowercase", self.span(token))
                args.append(Term.variable(str(token)))
        return Atom(self.predicate(raw.predicate, len(args)), tuple(args))

    def rule(self, raw: _RawRule, rule_id: str) -> Rule:
        if not raw.body:
            raise ParseError("rule has an empty body", self.span(raw.arrow))
        if not raw.head:
            raise ParseError("rule has an empty head", self.span(raw.arrow))
        body = tuple(self.atom(a, ground=False) for a in raw.body)
        head = tuple(self.atom(a, ground=False) for a in raw.head)
        body_vars = {t for a in body for t in a.args}
        for token in raw.existentials or []:
            if Term.variable(str(token)) in body_vars:
                raise ParseError(f"existential variable {token} used in body", self.span(token))
        return Rule(rule_id, body, head)

    def query(self, raw: _RawQuery) -> CQ:
        atoms = tuple(self.atom(a, ground=False) for a in raw.atoms)
        occurring = {t for a in atoms for t in a.args}
        answers = []
        for token in raw.answers:
            v = Term.variable(str(token))
            if v not in occurring:
                raise ParseError(f"answer variable {token} does not occur in the query atoms", self.span(token))
            answers.append(v)
        return CQ(atoms, tuple(answers))


def parse_rules(text: str, file: str = "<string>", name: str = "R") -> RuleSet:
    """
    Parse a rule file; rules get ids r1, r2, ... in file order.

    Raises:
        ParseError: On syntax errors, empty bodies or heads and misplaced existentials
        ArityConflictError: When a predicate is used with two arities
    """
    builder = _Builder(file)
    raw_rules = _parse_tree(text, "rules_file", file)
    return RuleSet(tuple(builder.rule(raw, f"r{i}") for i, raw in enumerate(raw_rules, start=1)), name)


def parse_facts(text: str, file: str = "<string>") -> Instance:
    """Parse ground facts; the fact true is always added"""
    builder = _Builder(file)
    raw_facts = _parse_tree(text, "facts_file", file)
    return Instance(frozenset(builder.atom(raw, ground=True) for raw in raw_facts))


def parse_query(text: str, file: str = "<string>") -> CQ:
    """Parse a single query `?(x̄) <- atoms.`"""
    builder = _Builder(file)
    return builder.query(_parse_tree(text, "query_file", file))


def _align(q: CQ, base: Sequence[Term]) -> CQ:
    mapping: Dict[Term, Term] = {v: base[q.answer_vars.index(v)] for v in q.answer_vars}
    targets = set(mapping.values())
    fresh = FreshNames(t.label for t in q.variables | set(base))
    for v in sorted(q.existential_vars, key=lambda t: t.sort_key):
        if v in targets:
            mapping[v] = Term.variable(fresh())
    return CQ(tuple(apply_substitution(a, mapping) for a in q.atoms), tuple(mapping[v] for v in q.answer_vars))


def parse_ucq(text: str, file: str = "<string>") -> UCQ:
    """Parse one or more queries of equal arity as a union"""
    builder = _Builder(file)
    queries = [builder.query(raw) for raw in _parse_tree(text, "ucq_file", file)]
    arity = queries[0].arity
    if any(q.arity != arity for q in queries):
        raise ParseError("queries of a union must share their arity", SourceSpan(file, 1, 1))
    general = next((q for q in queries if len(set(q.answer_vars)) == arity), None)
    base = general.answer_vars if general else tuple(Term.variable(f"a{i}") for i in range(1, arity + 1))
    return UCQ(tuple(_align(q, base) for q in queries), base)


def _read(path: Union[str, Path]) -> Tuple[str, str]:
    path = Path(path)
    return path.read_text(encoding="utf-8"), str(path)


def load_rules(path: Union[str, Path]) -> RuleSet:
    text, file = _read(path)
    return parse_rules(text, file, name=Path(file).stem)


def load_facts(path: Union[str, Path]) -> Instance:
    text, file = _read(path)
    return parse_facts(text, file)


def load_query(path: Union[str, Path]) -> CQ:
    text, file = _read(path)
    return parse_query(text, file)


def load_ucq(path: Union[str, Path]) -> UCQ:
    text, file = _read(path)
    return parse_ucq(text, file)
