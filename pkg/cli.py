"""
Regal Rules Toolkit - command line

Subcommands:
    parse                       parse and re-emit rules, facts or a query
    chase                       oblivious chase to --depth
    rewrite                     UCQ rewriting of --query within --generations
    surgery <action>            encode-db, reify, streamline, body-rewrite, regalize
    check <property>            fe, pu, quick, bdd
    analyze <what>              tournament, loop, valley, witnesses
    verify-pawn                 the full tournament-to-loop pipeline

Exit codes:
    0  success, or a decided answer
    1  usage, parse or input error
    2  budget exceeded, resource guard hit or inconclusive
    3  internal soundness failure, failed obligation or failed regal flag

The payload goes to standard output; diagnostics go to standard error.
"""

import argparse
import asyncio
import sys
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from agents.valley_agent import edge_query
from pawn_orchestrator import PawnOrchestrator, Verdict
from src.analysis import (
    find_tournament,
    has_loop,
    is_valley_query,
    max_tournament,
    maximal_variables,
    witnesses,
)
from src.config import EmitFormat, RunConfig, configure_logging
from src.errors import (
    PawnError,
    PreconditionError,
    RewritingBudgetExceeded,
    SoundnessError,
)
from src.model import Instance, RuleSet
from src.ruleEngine import bdd_constant_empirical, chase, injectivize, ucq_rewrite
from src.sampling import random_instances
from src.scanners import (
    emit_dot,
    emit_json,
    emit_report_json,
    format_facts,
    format_query,
    format_rules,
    format_ucq,
    load_facts,
    load_query,
    load_rules,
)
from src.surgery import (
    body_rewrite,
    check_forward_existential,
    check_predicate_unique,
    check_quick_empirical,
    encode_db,
    regalize,
    reify,
    streamline,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONCLUSIVE = 2
EXIT_SOUNDNESS = 3


class UsageError(Exception):
    """Missing or inconsistent command-line input"""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _diagnose(message: str) -> None:
    print(message, file=sys.stderr)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rules", dest="rules_path", help="rule file")
    common.add_argument("--facts", dest="facts_path", help="fact file")
    common.add_argument("--query", dest="query_path", help="query file")
    common.add_argument("--emit", choices=[f.value for f in EmitFormat], help="output format (default text)")
    common.add_argument("--depth", type=int, help="chase depth")
    common.add_argument("--k", dest="k_target", type=int, help="tournament size")
    common.add_argument("--generations", type=int, help="rewriting generations")
    common.add_argument("--max-cqs", dest="max_cqs", type=int, help="rewriting size limit")
    common.add_argument("--max-atoms", dest="max_atoms", type=int, help="chase resource guard")
    common.add_argument("--samples", type=int, help="number of random sample instances")
    common.add_argument("--seed", type=int, help="seed of the random samples")
    common.add_argument("--obligation-depth", dest="obligation_depth", type=int, help="source depth of obligations")
    common.add_argument("--slack", type=int, help="depth factor for stretched obligations")
    common.add_argument("--edge-predicate", dest="edge_predicate", help="binary edge predicate (default E)")
    common.add_argument("--source", help="edge source term for analyze witnesses")
    common.add_argument("--target", help="edge target term for analyze witnesses")
    common.add_argument("--verify-obligations", action="store_true", help="run the surgery obligations")
    common.add_argument("--log-level", dest="log_level", help="logging level for diagnostics")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = _Parser(prog="pawn", description="Existential rules, chase, rewriting and regal surgery toolkit")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    commands.add_parser("parse", parents=[common], help="parse and re-emit input files")
    commands.add_parser("chase", parents=[common], help="oblivious chase")
    commands.add_parser("rewrite", parents=[common], help="UCQ rewriting")
    commands.add_parser("verify-pawn", parents=[common], help="tournament-to-loop verification")

    groups = {
        "surgery": ["encode-db", "reify", "streamline", "body-rewrite", "regalize"],
        "check": ["fe", "pu", "quick", "bdd"],
        "analyze": ["tournament", "loop", "valley", "witnesses"],
    }
    for group, actions in groups.items():
        sub = commands.add_parser(group, help=f"{group} subcommands")
        choices = sub.add_subparsers(dest="action", required=True, parser_class=_Parser)
        for action in actions:
            choices.add_parser(action, parents=[common])
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    fields = (
        "rules_path", "facts_path", "query_path", "emit", "depth", "k_target", "generations", "max_cqs",
        "max_atoms", "samples", "seed", "obligation_depth", "slack", "edge_predicate",
    )
    return RunConfig.from_env(**{name: getattr(args, name) for name in fields})


def _rules(config: RunConfig) -> RuleSet:
    if not config.rules_path:
        raise UsageError("--rules is required")
    return load_rules(config.rules_path)


def _facts(config: RunConfig, required: bool = False) -> Instance:
    if not config.facts_path:
        if required:
            raise UsageError("--facts is required")
        return Instance()
    return load_facts(config.facts_path)


def _query(config: RunConfig):
    if not config.query_path:
        raise UsageError("--query is required")
    return load_query(config.query_path)


def _no_dot(config: RunConfig, what: str) -> None:
    if config.emit is EmitFormat.DOT:
        raise UsageError(f"dot output is not available for {what}")


def cmd_parse(args: argparse.Namespace, config: RunConfig) -> int:
    _no_dot(config, "parse")
    if not (config.rules_path or config.facts_path or config.query_path):
        raise UsageError("parse needs --rules, --facts or --query")
    parsed = {}
    if config.rules_path:
        parsed["rules"] = format_rules(_rules(config))
    if config.facts_path:
        parsed["facts"] = format_facts(_facts(config))
    if config.query_path:
        parsed["query"] = format_query(_query(config)) + "\n"
    if config.emit is EmitFormat.JSON:
        print(emit_report_json(parsed))
    else:
        print("".join(parsed[key] for key in ("rules", "facts", "query") if key in parsed), end="")
    return EXIT_OK


def cmd_chase(args: argparse.Namespace, config: RunConfig) -> int:
    trace = chase(_facts(config), _rules(config), config.depth, config.max_atoms)
    if config.emit is EmitFormat.JSON:
        print(emit_json(trace))
    elif config.emit is EmitFormat.DOT:
        print(emit_dot(trace, name="chase"), end="")
    else:
        for index, atoms in enumerate(trace.new_atoms):
            print(f"% step {index}")
            for atom in atoms:
                if not atom.is_top:
                    print(f"{atom}.")
    if not trace.completed:
        _diagnose(f"GuardExceeded: chase stopped at step {trace.depth} with {len(trace.final)} atoms")
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_rewrite(args: argparse.Namespace, config: RunConfig) -> int:
    _no_dot(config, "rewrite")
    run = ucq_rewrite(_query(config), _rules(config), config.budget())
    if config.emit is EmitFormat.JSON:
        print(emit_report_json({**run.to_dict(), "ucq": [str(q) for q in run.final.disjuncts]}))
    else:
        print(format_ucq(run.final), end="")
    if not run.converged:
        _diagnose(f"BudgetExceeded: rewriting did not converge within {run.generation_count} generations")
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_surgery(args: argparse.Namespace, config: RunConfig) -> int:
    _no_dot(config, "surgery")
    action = args.action
    if action == "encode-db":
        output = RuleSet((encode_db(_facts(config, required=True)),), "db")
    elif action == "reify":
        output = reify(_rules(config))
    elif action == "streamline":
        output = streamline(_rules(config))
    elif action == "body-rewrite":
        output = body_rewrite(_rules(config), config.budget())
    else:
        return _regalize(args, config)
    if config.emit is EmitFormat.JSON:
        print(emit_report_json({"name": output.name, "rules": [str(r) for r in output]}))
    else:
        print(format_rules(output, with_ids=True), end="")
    return EXIT_OK


def _regalize(args: argparse.Namespace, config: RunConfig) -> int:
    regal, report = regalize(
        _facts(config),
        _rules(config),
        config.budget(),
        samples=config.samples,
        obligation_depth=config.obligation_depth,
        slack=config.slack,
        seed=config.seed,
        max_atoms=config.max_atoms,
    )
    if args.verify_obligations:
        report.run_obligations()
    if config.emit is EmitFormat.JSON:
        print(emit_report_json({"rules": [str(r) for r in regal], "report": report.to_dict()}))
    else:
        print(format_rules(regal, with_ids=True), end="")
    if not report.is_regal:
        for name, flag in sorted(report.flags.items()):
            if not flag:
                _diagnose(f"regal flag {name} fails: {flag.counterexample}")
        return EXIT_SOUNDNESS
    if report.obligations_failed:
        for result in report.obligations_failed:
            _diagnose(f"obligation {result.name} failed on sample {result.sample}: {result.detail}")
        return EXIT_SOUNDNESS
    if report.obligations_inconclusive:
        _diagnose(f"{len(report.obligations_inconclusive)} obligation checks were inconclusive")
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_check(args: argparse.Namespace, config: RunConfig) -> int:
    _no_dot(config, "check")
    rules = _rules(config)
    if args.action == "bdd":
        q = _query(config)
        if config.facts_path:
            samples = [_facts(config)]
        else:
            samples = random_instances(rules.signature | q.signature, config.samples, config.seed)
        bound = bdd_constant_empirical(q, rules, samples, config.depth, config.max_atoms)
        payload = {"property": "bdd", "query": str(q), "horizon": config.depth, "constant": bound}
        print(emit_report_json(payload) if config.emit is EmitFormat.JSON else f"bdd constant: {bound}")
        if bound is None:
            _diagnose(f"answers still grow after the horizon {config.depth}")
            return EXIT_INCONCLUSIVE
        return EXIT_OK

    if args.action == "fe":
        result = check_forward_existential(rules)
    elif args.action == "pu":
        result = check_predicate_unique(rules)
    else:
        samples = random_instances(rules.signature, config.samples, config.seed)
        result = check_quick_empirical(rules, samples, max(config.depth, 1), config.max_atoms)
    if config.emit is EmitFormat.JSON:
        print(emit_report_json(result.to_dict()))
    else:
        print(f"{result.name}: {'holds' if result.holds else 'fails'}")
        if result.counterexample:
            print(f"counterexample: {result.counterexample}")
    return EXIT_OK


def _analysis_instance(config: RunConfig) -> Instance:
    instance = _facts(config, required=not config.rules_path)
    if config.rules_path:
        trace = chase(instance, _rules(config), config.depth, config.max_atoms)
        if not trace.completed:
            raise PreconditionError(f"chase stopped on the atom guard at step {trace.depth}")
        return trace.final
    return instance


def cmd_analyze(args: argparse.Namespace, config: RunConfig) -> int:
    predicate = config.edge_predicate
    if args.action == "valley":
        _no_dot(config, "analyze valley")
        q = _query(config)
        payload = {
            "query": str(q),
            "valley": is_valley_query(q),
            "maximal": [v.label for v in maximal_variables(q)],
        }
        if config.emit is EmitFormat.JSON:
            print(emit_report_json(payload))
        else:
            print(f"valley: {str(payload['valley']).lower()}")
            print(f"maximal: {' '.join(payload['maximal'])}")
        return EXIT_OK

    if args.action == "witnesses":
        return _witnesses(args, config)

    instance = _analysis_instance(config)
    if args.action == "loop":
        _no_dot(config, "analyze loop")
        term = has_loop(instance, predicate)
        payload = {"predicate": predicate, "loop": term.label if term is not None else None}
        if config.emit is EmitFormat.JSON:
            print(emit_report_json(payload))
        else:
            print(f"loop: {payload['loop'] if term is not None else 'none'}")
        return EXIT_OK

    if args.k_target is not None:
        tournament = find_tournament(instance, config.k_target, predicate)
    else:
        tournament = max_tournament(instance, predicate=predicate)
    if tournament is None:
        payload = {"predicate": predicate, "size": 0, "requested": config.k_target, "vertices": [], "arcs": []}
    else:
        payload = tournament.to_dict()
    if config.emit is EmitFormat.JSON:
        print(emit_report_json(payload))
    elif config.emit is EmitFormat.DOT:
        vertices = set(tournament.vertices) if tournament is not None else set()
        print(emit_dot(Instance(frozenset(a for a in instance.atoms if a.terms <= vertices)), name="tournament"), end="")
    elif tournament is None:
        print(f"no {predicate}-tournament of size {config.k_target}")
    else:
        print(f"tournament of size {tournament.size}: {' '.join(v.label for v in tournament.vertices)}")
    return EXIT_OK


def _witnesses(args: argparse.Namespace, config: RunConfig) -> int:
    _no_dot(config, "analyze witnesses")
    if not args.source or not args.target:
        raise UsageError("analyze witnesses needs --source and --target")
    rules = _rules(config)
    trace = chase(_facts(config), rules, config.depth, config.max_atoms)
    if not trace.completed:
        raise PreconditionError(f"chase stopped on the atom guard at step {trace.depth}")
    by_label = {t.label: t for t in trace.final.adom}
    missing = [label for label in (args.source, args.target) if label not in by_label]
    if missing:
        raise PreconditionError(f"term {missing[0]} does not occur in the chase")
    s, t = by_label[args.source], by_label[args.target]

    run = ucq_rewrite(edge_query(config.edge_predicate), rules, config.budget())
    if not run.converged:
        _diagnose(f"BudgetExceeded: edge rewriting did not converge within {run.generation_count} generations")
        return EXIT_INCONCLUSIVE
    found = witnesses(s, t, injectivize(run.final), trace.final)
    records = [{**w.to_dict(), "timestamps": sorted(w.timestamps(trace))} for w in found]
    if config.emit is EmitFormat.JSON:
        print(emit_report_json({"edge": [s.label, t.label], "witnesses": records}))
    else:
        for record in records:
            mapping = ", ".join(f"{v}->{image}" for v, image in record["mapping"].items())
            valley = " valley" if record["valley"] else ""
            print(f"[{record['disjunct']}] {record['query']} {{{mapping}}} ts={record['timestamps']}{valley}")
    return EXIT_OK


def cmd_verify_pawn(args: argparse.Namespace, config: RunConfig) -> int:
    _no_dot(config, "verify-pawn")
    instance, rules = _facts(config), _rules(config)
    orchestrator = PawnOrchestrator()
    report = asyncio.run(orchestrator.run_verification(instance, rules, config, args.verify_obligations))
    if config.emit is EmitFormat.JSON:
        print(emit_report_json(report.to_dict()))
    else:
        print(report.summary())
    if report.verdict is Verdict.INCONCLUSIVE:
        _diagnose(f"Inconclusive: {report.reason}")
        return EXIT_INCONCLUSIVE
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "parse": cmd_parse,
    "chase": cmd_chase,
    "rewrite": cmd_rewrite,
    "surgery": cmd_surgery,
    "check": cmd_check,
    "analyze": cmd_analyze,
    "verify-pawn": cmd_verify_pawn,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name (default: sys.argv[1:])

    Returns:
        Exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.log_level)
    try:
        config = _config(args)
        return COMMANDS[args.command](args, config)
    except ValidationError as e:
        _diagnose(f"invalid settings: {e}")
        return EXIT_USAGE
    except (UsageError, OSError) as e:
        _diagnose(f"error: {e}")
        return EXIT_USAGE
    except RewritingBudgetExceeded as e:
        _diagnose(f"BudgetExceeded: {e}")
        return EXIT_INCONCLUSIVE
    except SoundnessError as e:
        _diagnose(f"SoundnessError: {e}")
        return EXIT_SOUNDNESS
    except PawnError as e:
        _diagnose(f"{type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
