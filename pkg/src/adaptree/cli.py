"""Developer command line: validate, eval, rules, table, check-distributive,
simulate, serve.

Exit codes: 0 success, 1 failed check (diagnostics, counterexample), 2 domain
too large, 64 usage error, 65 unparseable input, 66 unreadable file.
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
from pathlib import Path

from . import game
from .context import UserProfile, assign_level
from .dsl import Diagnostic, RuleDocument, try_parse
from .errors import AdaptreeError, DomainTooLargeError
from .model import (
    UNAVAILABLE,
    BoolDomain,
    ContextSnapshot,
    ContextValue,
    EnumDomain,
    FeatureSet,
    IntRangeDomain,
    TimeDomain,
    format_action_value,
    format_minutes,
    parse_hhmm,
)
from .tree import (
    AdaptionFunction,
    Severity,
    assigned_features,
    check_distributive,
    domain_size,
    evaluate,
    evaluate_chain,
    extract_rules,
    tested_variables,
    to_decision_table,
    validate_tree,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_TOO_LARGE = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise _CliFailure(EXIT_NOINPUT, f"cannot read {path}: {exc}") from exc


def _print_diagnostic(path: str, diag: Diagnostic) -> None:
    print(f"{path}:{diag.line}:{diag.column}: {diag.severity.value}: {diag.message}")


def _parse_document(path: str) -> RuleDocument:
    doc, diagnostics = try_parse(_read_file(path))
    if doc is None:
        for diag in diagnostics:
            _print_diagnostic(path, diag)
        raise _CliFailure(EXIT_DATA, f"{path}: parse failed")
    return doc


def _pick_tree(doc: RuleDocument, name: str, path: str):
    try:
        return doc.tree(name)
    except KeyError:
        raise _CliFailure(EXIT_DATA, f"{path}: no tree named {name!r}") from None


def _format_context_value(value: object, domain: object) -> str:
    if value is UNAVAILABLE:
        return "unavailable"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(domain, TimeDomain) and isinstance(value, int):
        return format_minutes(value)
    return str(value)


def _parse_snapshot(text: str, doc: RuleDocument, path: str) -> ContextSnapshot:
    values: dict[str, ContextValue] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _CliFailure(EXIT_DATA, f"{path}:{lineno}: expected name=value")
        name, _, text_value = line.partition("=")
        name, text_value = name.strip(), text_value.strip()
        variable = doc.schema.get(name)
        if variable is None:
            raise _CliFailure(EXIT_DATA, f"{path}:{lineno}: undeclared context variable {name!r}")
        domain = variable.domain
        try:
            value: ContextValue
            if isinstance(domain, EnumDomain) and text_value in domain.tokens:
                value = text_value
            elif text_value == "unavailable":
                value = UNAVAILABLE
            elif isinstance(domain, BoolDomain):
                if text_value not in ("true", "false"):
                    raise ValueError("expected true or false")
                value = text_value == "true"
            elif isinstance(domain, IntRangeDomain):
                value = int(text_value)
            elif isinstance(domain, TimeDomain):
                value = parse_hhmm(text_value)
            else:
                raise ValueError(f"expected one of {', '.join(domain.tokens)}")
        except ValueError as exc:
            raise _CliFailure(EXIT_DATA, f"{path}:{lineno}: bad value for {name}: {exc}") from None
        values[name] = value
    return ContextSnapshot(values)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args: argparse.Namespace) -> int:
    source = _read_file(args.file)
    doc, diagnostics = try_parse(source)
    for diag in diagnostics:
        _print_diagnostic(args.file, diag)
    has_error = any(d.severity is Severity.ERROR for d in diagnostics)
    if doc is not None:
        for tree in doc.trees:
            for tdiag in validate_tree(tree, doc.schema):
                loc = tdiag.loc
                line, column = (loc.line, loc.column) if loc else (1, 1)
                print(f"{args.file}:{line}:{column}: {tdiag.severity.value}: "
                      f"{tdiag.message} (at {tdiag.path})")
                has_error = has_error or tdiag.severity is Severity.ERROR
    if not has_error:
        print(f"{args.file}: ok "
              f"({len(doc.contexts)} contexts, {len(doc.features)} features, {len(doc.trees)} trees)")
    return EXIT_FAIL if has_error else EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    doc = _parse_document(args.file)
    snapshot = _parse_snapshot(_read_file(args.context), doc, args.context)
    try:
        if args.tree:
            actions = evaluate(_pick_tree(doc, args.tree, args.file), snapshot)
        else:
            actions = evaluate_chain(doc.chain(), snapshot)
    except AdaptreeError as exc:
        print(f"evaluation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for feature, value in sorted(actions.items()):
        print(f"{feature}={format_action_value(value)}")
    return EXIT_OK


def cmd_rules(args: argparse.Namespace) -> int:
    doc = _parse_document(args.file)
    trees = [_pick_tree(doc, args.tree, args.file)] if args.tree else list(doc.trees)
    for tree in trees:
        for rule in extract_rules(tree):
            print(rule.describe())
    return EXIT_OK


def cmd_table(args: argparse.Namespace) -> int:
    doc = _parse_document(args.file)
    tree = _pick_tree(doc, args.tree, args.file)
    tested = tested_variables(tree)
    schema = [v for v in doc.contexts if v.name in tested]
    try:
        table = to_decision_table(tree, schema, max_rows=args.max_rows)
    except DomainTooLargeError as exc:
        print(f"{args.file}: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow([v.name for v in table.schema] + ["actions"])
    for row in table.rows:
        cells = [
            _format_context_value(value, var.domain)
            for value, var in zip(row.values, table.schema)
        ]
        if row.action is None:
            cells.append("unreachable")
        else:
            cells.append("; ".join(f"{k}={format_action_value(v)}" for k, v in sorted(row.action.items())))
        writer.writerow(cells)
    return EXIT_OK


def cmd_check_distributive(args: argparse.Namespace) -> int:
    full_doc = _parse_document(args.full)
    parts_doc = _parse_document(args.parts)
    if len(full_doc.trees) != 1:
        raise _CliFailure(EXIT_DATA, f"{args.full}: expected exactly one tree, found {len(full_doc.trees)}")
    if not parts_doc.trees:
        raise _CliFailure(EXIT_DATA, f"{args.parts}: no trees to compare against")

    declared = {v.name: v for v in full_doc.contexts}
    for variable in parts_doc.contexts:
        existing = declared.get(variable.name)
        if existing is None:
            declared[variable.name] = variable
        elif existing.domain != variable.domain:
            raise _CliFailure(
                EXIT_DATA,
                f"context {variable.name!r} declared with different domains "
                f"({existing.domain} vs {variable.domain})")

    full_tree = full_doc.trees[0]
    tested = set(tested_variables(full_tree))
    for tree in parts_doc.trees:
        tested |= tested_variables(tree)
    schema = [declared[name] for name in declared if name in tested]

    def function_for(tree) -> AdaptionFunction:
        return AdaptionFunction(
            context=tuple(schema),
            features=FeatureSet.of(*assigned_features(tree)),
            body=tree,
        )

    try:
        result = check_distributive(
            function_for(full_tree),
            [function_for(t) for t in parts_doc.trees],
            schema,
        )
    except DomainTooLargeError as exc:
        print(f"{exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except AdaptreeError as exc:
        raise _CliFailure(EXIT_DATA, str(exc)) from exc

    if result is True:
        print(f"distributive rule holds over {domain_size(schema)} snapshots")
        return EXIT_OK
    print("counterexample:")
    for name in sorted(result.snapshot.names()):
        variable = declared[name]
        print(f"  {name}={_format_context_value(result.snapshot[name], variable.domain)}")
    full_actions = ", ".join(f"{k}={format_action_value(v)}" for k, v in sorted(result.full_actions.items()))
    parts_actions = ", ".join(f"{k}={format_action_value(v)}" for k, v in sorted(result.parts_actions.items()))
    print(f"  full:  {full_actions}")
    print(f"  parts: {parts_actions}")
    return EXIT_FAIL


def cmd_simulate(args: argparse.Namespace) -> int:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["user", "unit", "accuracy", "theme", "level"])
    for user in range(1, args.users + 1):
        rng = random.Random(args.seed * 1_000_003 + user)
        skill = rng.random()
        age = rng.randint(3, 16)
        profile = UserProfile(
            username=f"sim{user}",
            password_hash="-",
            age=age,
            current_level=assign_level(age),
        )
        for unit in range(1, args.units + 1):
            theme = "default" if profile.first_time else game.accuracy_group(profile.last_unit_accuracy)
            level = profile.current_level
            for _ in range(game.QUESTIONS_PER_UNIT):
                question = game.generate_question(level, rng)
                if rng.random() < skill:
                    outcome = game.Outcome.CORRECT
                else:
                    outcome = game.Outcome.INCORRECT
                profile = game.append_result(profile, outcome)
                if outcome is not game.Outcome.CORRECT:
                    profile = game.record_mistake(profile, question)
            accuracy = profile.last_unit_accuracy
            writer.writerow([user, unit, accuracy, theme, level])
            if game.level_up_eligible(profile.performance[-1]):
                profile = game.apply_level_choice(profile, accept=True)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import config_from_env, create_app

    config = config_from_env()
    if args.rules:
        config.rules_source = _read_file(args.rules)
    if args.data_dir:
        config.data_dir = Path(args.data_dir)
    if args.static:
        config.static_dir = Path(args.static)
    uvicorn.run(create_app(config), host=args.host, port=args.port, log_level="info")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument wiring
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="adaptree", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="parse and semantically check a rule file")
    p.add_argument("file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("eval", help="evaluate a rule file against a context snapshot")
    p.add_argument("file")
    p.add_argument("--context", required=True, help="snapshot file, one name=value per line")
    p.add_argument("--tree", help="evaluate a single tree instead of the whole chain")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rules", help="list the adaption rules encoded by the trees")
    p.add_argument("file")
    p.add_argument("--tree", help="restrict to one tree")
    p.set_defaults(func=cmd_rules)

    p = sub.add_parser("table", help="expand a tree to an exhaustive decision table (CSV)")
    p.add_argument("file")
    p.add_argument("--tree", required=True)
    p.add_argument("--max-rows", type=int, default=1_000_000)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("check-distributive",
                       help="compare a full tree against a partitioned variant")
    p.add_argument("full")
    p.add_argument("parts")
    p.set_defaults(func=cmd_check_distributive)

    p = sub.add_parser("simulate", help="run scripted players headlessly, emitting CSV")
    p.add_argument("--users", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--units", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="serve the HTTP API (and web UI when built)")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--rules", help="rule file (defaults to the bundled arith_game rules)")
    p.add_argument("--data-dir", help="profile directory (defaults to $ADAPTREE_DATA_DIR or ./data)")
    p.add_argument("--static", help="directory of built web UI assets")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliFailure as failure:
        print(str(failure), file=sys.stderr)
        return failure.code
    except BrokenPipeError:
        # stdout consumer (head, less) went away; suppress the noisy traceback
        import os

        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
