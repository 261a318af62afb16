"""Command line front door.

Four commands: ``check`` runs every requirement check over a program,
``run`` executes one on a tape, ``graph`` exports a program graph at a
chosen construction stage, and ``schema`` analyzes the schema itself,
prints its grammar, or generates a random program from it.

Exit codes: 0 on success, 1 for check errors and usage or file
problems; ``run`` additionally uses 2 for a crashed execution and 3
for an exhausted step budget.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from .executor import CRASHED, STOPPED, final_tape, initialize, run, trace_json, trace_text
from .frontend import IllegalCharacter, ParseError, parse_text, render_program, to_canonical
from .graph import export
from .pipeline import check_program, make_executable
from .schema import (
    BudgetExceeded,
    Schema,
    check_and_condition,
    check_and_cycle_condition,
    export_grammar,
    generate_sytr,
    propagate_pairs,
    schema_from_json,
    turingol_schema,
    uni_labeled_family,
    validate,
)
from .semantics import link_is_declared_at
from .tape import parse_tape


def _fail(message: object) -> int:
    print(message, file=sys.stderr)
    return 1


def _read(path_text: str) -> str:
    return Path(path_text).read_text()


def _parsed_program(path_text: str):
    """Program text from a file, or an exit code when that fails."""
    try:
        return _read(path_text)
    except OSError as failure:
        return _fail(failure)


def _checked(text: str):
    """A CheckResult, or an exit code on syntax problems."""
    try:
        return check_program(text)
    except (IllegalCharacter, ParseError) as failure:
        return _fail(f"syntax error: {failure}")


def cmd_check(args: argparse.Namespace) -> int:
    text = _parsed_program(args.program)
    if isinstance(text, int):
        return text
    result = _checked(text)
    if isinstance(result, int):
        return result
    for finding in result.diagnostics:
        print(finding)
    print(f"{len(result.errors)} errors, {len(result.warnings)} warnings")
    return 0 if result.ok else 1


def cmd_run(args: argparse.Namespace) -> int:
    text = _parsed_program(args.program)
    if isinstance(text, int):
        return text
    if (args.tape is None) == (args.tape_file is None):
        return _fail("provide exactly one of --tape or --tape-file")
    if args.tape is not None:
        tape_text = args.tape
    else:
        try:
            tape_text = _read(args.tape_file)
        except OSError as failure:
            return _fail(failure)

    result = _checked(text)
    if isinstance(result, int):
        return result
    for warning in result.warnings:
        print(warning, file=sys.stderr)
    if not result.ok:
        for error in result.errors:
            print(error, file=sys.stderr)
        return 1

    instructions = make_executable(result, optimize=args.optimize)
    try:
        tape = parse_tape(tape_text)
        state = initialize(result.tree, tape, args.start, instructions, args.cautious)
    except ValueError as failure:
        return _fail(failure)

    outcome = run(state, args.max_steps)
    if args.trace == "text":
        print(trace_text(outcome.trace))
    elif args.trace == "json":
        print(trace_json(outcome.trace))
    tape_line = final_tape(state)
    if tape_line is not None:
        print(tape_line)
    print(outcome.outcome)
    if outcome.outcome == STOPPED:
        return 0
    if outcome.outcome == CRASHED:
        print(state.situation, file=sys.stderr)
        return 2
    return 3


def cmd_graph(args: argparse.Namespace) -> int:
    text = _parsed_program(args.program)
    if isinstance(text, int):
        return text
    if args.stage == "flow":
        result = _checked(text)
        if isinstance(result, int):
            return result
        if not result.ok:
            for error in result.errors:
                print(error, file=sys.stderr)
            return 1
        tree = result.tree
    else:
        try:
            tree = parse_text(text)
            if args.stage == "linked":
                link_is_declared_at(tree)
        except (IllegalCharacter, ParseError) as failure:
            return _fail(f"syntax error: {failure}")
        except ValueError as failure:
            return _fail(failure)
    out = export(tree.graph, args.format)
    sys.stdout.write(out if out.endswith("\n") else out + "\n")
    return 0


def _load_schema(args: argparse.Namespace):
    """The schema named by --schema, or the built-in one, or an exit code."""
    if args.schema is None:
        return turingol_schema()
    try:
        return schema_from_json(_read(args.schema))
    except OSError as failure:
        return _fail(failure)
    except (ValueError, KeyError, TypeError) as failure:
        return _fail(f"bad schema file: {failure!r}")


def _schema_check(schema: Schema) -> int:
    report = validate(schema)
    if not report.ok:
        for problem in report.errors:
            print(f"structure: {problem}")
        print("verdict: not guaranteed uni-labeled")
        return 1

    conflicts = check_and_condition(schema)
    if conflicts:
        for conflict in conflicts:
            print(
                f"AND condition violated at {conflict.node}: "
                f"{conflict.first.label.to_text()} overlaps {conflict.second.label.to_text()}"
            )
    else:
        print("AND condition: OK")

    cycles = check_and_cycle_condition(schema)
    if cycles:
        for cycle in cycles:
            print("AND-cycle condition violated on cycle: " + " -> ".join(cycle))
    else:
        print("AND-cycle condition: OK")

    if cycles:
        print("sufficient condition: not checked (cycle condition failed)")
    else:
        pairs = propagate_pairs(schema)
        if pairs.ok:
            print("sufficient condition: OK")
        else:
            for clash in pairs.conflicts:
                print(
                    f"sufficient condition violated at {clash.node}: "
                    f"({clash.first[0]}, {clash.first[1].to_text()}) overlaps "
                    f"({clash.second[0]}, {clash.second[1].to_text()})"
                )

    if uni_labeled_family(schema):
        print("verdict: uni-labeled family")
        return 0
    print("verdict: not guaranteed uni-labeled")
    return 1


def cmd_schema(args: argparse.Namespace) -> int:
    schema = _load_schema(args)
    if isinstance(schema, int):
        return schema
    if args.action == "grammar":
        print(export_grammar(schema))
        return 0
    if args.action == "check":
        return _schema_check(schema)
    rng = random.Random(args.seed)
    try:
        grown = generate_sytr(schema, args.root, word_source=rng, node_budget=args.budget)
        program = render_program(to_canonical(grown))
    except (BudgetExceeded, ValueError) as failure:
        return _fail(failure)
    print(program)
    return 0


def _start_position(text: str):
    if text in ("first", "last"):
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected first, last, or a cell index, got {text!r}"
        )


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wordtree",
        description="Check, run, and export Turingol programs as uni-labeled word trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check_p = sub.add_parser("check", help="parse a program and run every requirement check")
    check_p.add_argument("program", help="path to a program file")
    check_p.set_defaults(handler=cmd_check)

    run_p = sub.add_parser("run", help="check a program, mount a tape, and execute it")
    run_p.add_argument("program", help="path to a program file")
    run_p.add_argument("--tape", help="tape text, cells separated by whitespace")
    run_p.add_argument("--tape-file", help="path to a file holding the tape text")
    run_p.add_argument(
        "--start",
        type=_start_position,
        default="last",
        help="scanned cell: first, last, or a zero-based index (default last)",
    )
    run_p.add_argument(
        "--max-steps",
        type=_positive_int,
        default=10_000,
        help="step budget before the run is cut off (default 10000)",
    )
    run_p.add_argument(
        "--cautious",
        action="store_true",
        help="verify each direction is safe before performing it",
    )
    run_p.add_argument(
        "--optimize",
        action="store_true",
        help="inline compared and printed words into the instructions",
    )
    run_p.add_argument(
        "--trace",
        choices=("off", "text", "json"),
        default="off",
        help="print the step trace before the result (default off)",
    )
    run_p.set_defaults(handler=cmd_run)

    graph_p = sub.add_parser("graph", help="export a program graph")
    graph_p.add_argument("program", help="path to a program file")
    graph_p.add_argument(
        "--stage",
        choices=("sytr", "linked", "flow"),
        default="flow",
        help="construction stage to export (default flow)",
    )
    graph_p.add_argument("--format", choices=("dot", "json"), default="dot")
    graph_p.set_defaults(handler=cmd_graph)

    schema_p = sub.add_parser(
        "schema",
        help="analyze the schema, print its grammar, or generate a program",
    )
    schema_p.add_argument("action", choices=("check", "grammar", "gen"))
    schema_p.add_argument(
        "--schema",
        help="path to a schema JSON file (default: the built-in Turingol schema)",
    )
    schema_p.add_argument(
        "--root",
        default="P",
        help="schema name to generate from (default P)",
    )
    schema_p.add_argument("--seed", type=int, default=0, help="generator seed (default 0)")
    schema_p.add_argument(
        "--budget",
        type=_positive_int,
        default=500,
        help="node budget for generation (default 500)",
    )
    schema_p.set_defaults(handler=cmd_schema)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    sys.exit(main())
