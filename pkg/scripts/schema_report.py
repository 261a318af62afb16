#!/usr/bin/env python3
"""Full analysis report for a syntactic schema.

Prints the exported grammar, every elementary cycle with the OR-bearing
ones marked, the propagated label pairs per node, expansion counts, and
the uni-labeled family verdict. Defaults to the built-in Turingol
schema; pass --schema to analyze a schema stored as JSON.
"""

import argparse
import sys
from pathlib import Path

from wordtree.schema import (
    check_and_condition,
    check_and_cycle_condition,
    elementary_cycles,
    expansions,
    export_grammar,
    or_bearing_cycles,
    propagate_pairs,
    schema_from_json,
    turingol_schema,
    uni_labeled_family,
    validate,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--schema", help="path to a schema JSON file")
    args = parser.parse_args()

    schema = (
        schema_from_json(Path(args.schema).read_text())
        if args.schema
        else turingol_schema()
    )

    print("grammar")
    print("-------")
    print(export_grammar(schema))
    print()

    report = validate(schema)
    print("structure")
    print("---------")
    if report.ok:
        for name in schema.names():
            print(f"  {name}: {report.classes[name]}")
    else:
        for problem in report.errors:
            print(f"  problem: {problem}")
    print()

    print("cycles")
    print("------")
    bearing = set(or_bearing_cycles(schema))
    for cycle in sorted(elementary_cycles(schema)):
        mark = "  (OR-bearing)" if cycle in bearing else ""
        print("  " + " -> ".join(cycle) + mark)
    print()

    print("conditions")
    print("----------")
    conflicts = check_and_condition(schema)
    print(f"  AND condition: {'OK' if not conflicts else f'{len(conflicts)} conflicts'}")
    stuck = check_and_cycle_condition(schema)
    print(f"  AND-cycle condition: {'OK' if not stuck else f'{len(stuck)} stuck cycles'}")
    if not stuck:
        pairs = propagate_pairs(schema)
        print(
            "  sufficient condition: "
            + ("OK" if pairs.ok else f"{len(pairs.conflicts)} clashes")
        )
        if pairs.ok:
            print()
            print("settled pairs per node")
            for name in schema.names():
                carried = sorted(
                    f"({origin}, {spec.to_text()})" for origin, spec in pairs.pairs[name]
                )
                print(f"  {name}: {', '.join(carried) if carried else '(none)'}")
    print()

    print("expansion counts")
    print("----------------")
    for name in schema.names():
        print(f"  {name}: {len(expansions(schema, name))}")
    print()

    verdict = uni_labeled_family(schema)
    print(f"verdict: {'uni-labeled family' if verdict else 'not guaranteed uni-labeled'}")
    return 0 if verdict else 1


if __name__ == "__main__":
    sys.exit(main())
