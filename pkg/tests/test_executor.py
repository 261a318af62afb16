"""Instruction installation, tape attachment, and graph-walking runs."""

import json
from pathlib import Path

import pytest

from wordtree.control_flow import (
    NEXT,
    add_stop_node,
    build_back_arrows,
    build_control,
)
from wordtree.executor import (
    BUDGET_EXHAUSTED,
    CRASHED,
    DIRECTIONS_EXHAUSTED,
    LEFT_CELL_PATH,
    NO_INSTRUCTION,
    NORMAL_CONDITION_VIOLATED,
    PRINT_WORD_PATH,
    RIGHT_CELL_PATH,
    RUNNING,
    STOPPED,
    SYMBOL_PATH,
    TAPE_PATH,
    Act,
    Guarded,
    Instruction,
    final_tape,
    initialize,
    install_instructions,
    run,
    step,
    trace_json,
    trace_text,
)
from wordtree.frontend import parse_text
from wordtree.graph import (
    CONTROL,
    SEMANTIC,
    SYNTACTIC,
    TAPE,
    CreateNodeWithArrowFromSource,
    CreateNodeWithArrowToTarget,
    FollowArrow,
    LabelsEqual,
    NoArrowFrom,
    NoArrowTo,
    ReassignArrow,
    RelabelNode,
    Stop,
    check_uni_labeled,
)
from wordtree.semantics import STATEMENT, classify
from wordtree.tape import parse_tape

EXPECTED_RUNS = json.loads(
    (Path(__file__).parent / "data" / "expected_runs.json").read_text()
)


def prepare(text: str, optimize: bool = False):
    tree = parse_text(text)
    stop = add_stop_node(tree)
    build_back_arrows(tree, stop)
    build_control(tree, stop)
    instructions = install_instructions(tree, stop, optimize=optimize)
    return tree, stop, instructions


def statements(tree) -> list[int]:
    classes = classify(tree)
    return [n for n in tree.graph.nodes() if classes[n].kind == STATEMENT]


def execute(text: str, tape_text: str, start, optimize=False, cautious=False):
    """Full pipeline run; statement ids are taken before the tape merges in."""
    tree, stop, instructions = prepare(text, optimize=optimize)
    s_nodes = statements(tree)
    state = initialize(tree, parse_tape(tape_text), start, instructions, cautious)
    return run(state), tree, stop, s_nodes


@pytest.fixture
def increment_parts(increment_text):
    return prepare(increment_text)


class TestInstall:
    def test_instructed_nodes(self, increment_parts):
        tree, stop, instructions = increment_parts
        assert set(instructions) == set(statements(tree)) | {tree.root, stop}
        assert len(instructions) == 13

    def test_if_instruction(self, increment_parts):
        tree, _, instructions = increment_parts
        if1 = statements(tree)[2]
        assert instructions[if1].directions == (
            Guarded(LabelsEqual(TAPE_PATH, SYMBOL_PATH), FollowArrow("yes")),
            Act(FollowArrow("no")),
        )
        assert instructions[if1].phrases() == [
            'if the "tape-alphabet"+tape node label equals the +""+is '
            "node label, then follow the 'yes' arrow",
            "follow the 'no' arrow",
        ]

    def test_print_instruction(self, increment_parts):
        tree, _, instructions = increment_parts
        p1 = statements(tree)[0]
        assert instructions[p1].directions == (
            Act(RelabelNode(TAPE_PATH, PRINT_WORD_PATH)),
            Act(FollowArrow(NEXT)),
        )

    def test_move_instructions_mirror(self, increment_parts):
        tree, _, instructions = increment_parts
        m1, m2 = statements(tree)[5], statements(tree)[8]
        left = instructions[m1].directions
        assert left[0] == Guarded(
            NoArrowTo("", TAPE_PATH), CreateNodeWithArrowToTarget(TAPE_PATH)
        )
        assert left[1] == Act(ReassignArrow("tape", LEFT_CELL_PATH))
        assert left[2] == Act(FollowArrow(NEXT))
        right = instructions[m2].directions
        assert right[0] == Guarded(
            NoArrowFrom("", TAPE_PATH), CreateNodeWithArrowFromSource(TAPE_PATH)
        )
        assert right[1] == Act(ReassignArrow("tape", RIGHT_CELL_PATH))

    def test_plain_nodes_follow_next(self, increment_parts):
        tree, stop, instructions = increment_parts
        follow = Instruction((Act(FollowArrow(NEXT)),))
        names = statements(tree)
        for node in (tree.root, names[1], names[3], names[6], names[10]):
            assert instructions[node] == follow
        assert instructions[stop] == Instruction((Act(Stop()),))

    def test_empty_statement_follows_next(self):
        tree, stop, instructions = prepare("tape-alphabet is a;\n.")
        empty = statements(tree)[0]
        assert tree.graph.node_label(empty) == ""
        assert instructions[empty] == Instruction((Act(FollowArrow(NEXT)),))

    def test_requires_control_arrows(self, increment_text):
        tree = parse_text(increment_text)
        stop = add_stop_node(tree)
        with pytest.raises(ValueError, match="control"):
            install_instructions(tree, stop)


class TestInitialize:
    def test_tape_arrow_to_last_cell(self, increment_parts):
        tree, _, instructions = increment_parts
        initialize(tree, parse_tape("one one"), "last", instructions)
        g = tree.graph
        tapes = [a for _, a in g.arrows() if a.label == "tape"]
        assert len(tapes) == 1
        arrow = tapes[0]
        assert arrow.src == tree.root and arrow.kind == SEMANTIC
        assert g.out_arrows(arrow.dst, kinds=(TAPE,)) == []

    def test_state_starts_at_root(self, increment_parts):
        tree, _, instructions = increment_parts
        state = initialize(tree, parse_tape("one"), "first", instructions)
        assert state.current == tree.root
        assert state.steps == 0
        assert state.status == RUNNING
        assert state.last_tape == "one"

    def test_index_zero_is_first(self, increment_text):
        for start in ("first", 0):
            tree, _, instructions = prepare(increment_text)
            initialize(tree, parse_tape("one zero"), start, instructions)
            g = tree.graph
            cell = [a.dst for _, a in g.arrows() if a.label == "tape"][0]
            assert g.in_arrows(cell, kinds=(TAPE,)) == []

    def test_bad_start_positions(self, increment_parts):
        tree, _, instructions = increment_parts
        tape = parse_tape("one zero")
        with pytest.raises(ValueError, match="outside"):
            initialize(tree, tape, 5, instructions)
        with pytest.raises(ValueError, match="outside"):
            initialize(tree, tape, -1, instructions)
        with pytest.raises(ValueError, match="start"):
            initialize(tree, tape, "middle", instructions)

    def test_refuses_second_tape(self, increment_parts):
        tree, _, instructions = increment_parts
        initialize(tree, parse_tape("one"), "first", instructions)
        with pytest.raises(ValueError, match="tape"):
            initialize(tree, parse_tape("one"), "first", instructions)

    def test_refuses_label_errors(self, program_path):
        tree = parse_text(program_path("duplicate_label.tgl").read_text())
        with pytest.raises(ValueError, match="L1"):
            initialize(tree, parse_tape("one"), "first", {})

    def test_refuses_undeclared_words(self):
        tree = parse_text("tape-alphabet is one;\nprint 'two'.")
        with pytest.raises(ValueError, match="AW2"):
            initialize(tree, parse_tape("one"), "first", {})


class TestStep:
    def test_root_step_follows_next(self, increment_parts):
        tree, _, instructions = increment_parts
        state = initialize(tree, parse_tape("one"), "first", instructions)
        step(state)
        assert state.steps == 1
        assert tree.graph.node_label(state.current) == "print"

    def test_if_follows_yes_on_match(self):
        text = (
            "tape-alphabet is one, two;\n"
            "if the-tape-symbol is 'one' then go to x;\nx: print 'two'."
        )
        result, _, _, _ = execute(text, "one", "first")
        assert [e.label for e in result.trace] == [
            "tape-alphabet", "if", "go", "print", "stop",
        ]
        assert "'yes'" in result.trace[1].direction
        assert result.outcome == STOPPED
        assert final_tape(result.state) == "two"

    def test_if_follows_no_on_mismatch(self):
        text = (
            "tape-alphabet is one, two;\n"
            "if the-tape-symbol is 'one' then go to x;\nx: print 'two'."
        )
        result, _, _, _ = execute(text, "two", "first")
        assert [e.label for e in result.trace] == [
            "tape-alphabet", "if", "print", "stop",
        ]
        assert result.trace[1].direction == "follow the 'no' arrow"

    def test_empty_instruction_exhausts(self, increment_parts):
        tree, _, instructions = increment_parts
        first = statements(tree)[0]
        instructions = dict(instructions)
        instructions[first] = Instruction(())
        state = initialize(tree, parse_tape("one"), "first", instructions)
        result = run(state)
        assert result.outcome == CRASHED
        assert state.situation.situation == DIRECTIONS_EXHAUSTED
        assert state.situation.node == first

    def test_missing_instruction_crashes(self, increment_parts):
        tree, _, instructions = increment_parts
        first = statements(tree)[0]
        instructions = dict(instructions)
        del instructions[first]
        state = initialize(tree, parse_tape("one"), "first", instructions)
        result = run(state)
        assert result.outcome == CRASHED
        assert state.situation.situation == NO_INSTRUCTION
        assert "holds no instruction" in str(state.situation)

    def test_finished_state_cannot_step(self, increment_text):
        result, _, _, _ = execute(increment_text, "one", "last")
        assert result.outcome == STOPPED
        with pytest.raises(ValueError, match="stopped"):
            step(result.state)


class TestRuns:
    @pytest.mark.parametrize("case", EXPECTED_RUNS["cases"], ids=lambda c: c["tape"])
    def test_expected_runs(self, increment_text, case):
        result, _, _, _ = execute(increment_text, case["tape"], case["start"])
        assert result.outcome == case["outcome"]
        assert result.steps == case["steps"]
        assert final_tape(result.state) == case["final_tape"]
        assert [e.label for e in result.trace] == case["trace_labels"]
        if "snapshots" in case:
            changes = [[e.step, e.tape] for e in result.trace if e.tape is not None]
            assert changes == case["snapshots"]

    def test_trace_steps_count_up(self, increment_text):
        result, _, _, _ = execute(increment_text, "one one", "last")
        assert [e.step for e in result.trace] == list(range(1, 19))

    def test_case_one_node_sequence(self, increment_text):
        result, tree, stop, s_nodes = execute(increment_text, "one one", "last")
        p1, g1, if1, sc1, p3, m1, g2, p2, m2, if2, g3 = s_nodes
        assert [e.node for e in result.trace] == [
            tree.root, p1, g1, m1, g2, if1, sc1, p3, m1, g2,
            if1, p2, m2, if2, g3, m2, if2, stop,
        ]

    def test_steps_land_on_statements_or_stop(self, increment_text):
        for case in EXPECTED_RUNS["cases"]:
            result, tree, stop, s_nodes = execute(
                increment_text, case["tape"], case["start"]
            )
            allowed = set(s_nodes) | {tree.root, stop}
            assert all(e.node in allowed for e in result.trace)
            assert all(e.node != tree.root for e in result.trace[1:])

    def test_budget_exhaustion(self, program_path):
        text = program_path("next_cycle.tgl").read_text()
        result, _, _, _ = execute(text, "one", "first")
        assert result.outcome == BUDGET_EXHAUSTED
        assert result.steps == 10_000

    def test_budget_parameter(self, program_path):
        text = program_path("next_cycle.tgl").read_text()
        tree, stop, instructions = prepare(text)
        state = initialize(tree, parse_tape("one"), "first", instructions)
        result = run(state, max_steps=50)
        assert result.outcome == BUDGET_EXHAUSTED
        assert result.steps == 50

    def test_identical_runs_trace_identically(self, increment_text):
        first, _, _, _ = execute(increment_text, "one one one", "last")
        second, _, _, _ = execute(increment_text, "one one one", "last")
        assert first.trace == second.trace

    def test_uni_labeled_after_runs(self, increment_text):
        for case in EXPECTED_RUNS["cases"]:
            result, tree, _, _ = execute(increment_text, case["tape"], case["start"])
            assert check_uni_labeled(tree.graph) == []


class TestRunDiscipline:
    def test_program_nodes_never_relabeled(self, increment_text):
        tree, stop, instructions = prepare(increment_text)
        program_nodes = list(tree.graph.nodes())
        before = {n: tree.graph.node_label(n) for n in program_nodes}
        state = initialize(tree, parse_tape("one one"), "last", instructions)
        run(state)
        after = {n: tree.graph.node_label(n) for n in program_nodes}
        assert before == after

    def test_only_tape_structure_changes(self, increment_text):
        tree, stop, instructions = prepare(increment_text)
        state = initialize(tree, parse_tape("one one"), "last", instructions)
        g = tree.graph

        def arrows_of(kind):
            return sorted(
                (a.src, a.label, a.dst) for _, a in g.arrows() if a.kind == kind
            )

        fixed_before = {k: arrows_of(k) for k in (SYNTACTIC, CONTROL)}
        tape_before = arrows_of(TAPE)
        run(state)
        fixed_after = {k: arrows_of(k) for k in (SYNTACTIC, CONTROL)}
        assert fixed_before == fixed_after
        assert set(tape_before).issubset(set(arrows_of(TAPE)))

    def test_growth_only_on_move_steps(self, increment_text):
        tree, stop, instructions = prepare(increment_text)
        state = initialize(tree, parse_tape("one one"), "last", instructions)
        g = tree.graph
        while state.status == RUNNING:
            before = g.node_count
            step(state)
            grew = g.node_count - before
            assert grew in (0, 1)
            if grew:
                assert state.trace[-1].label == "move"


class TestModes:
    @pytest.mark.parametrize("case", EXPECTED_RUNS["cases"], ids=lambda c: c["tape"])
    def test_optimized_runs_agree(self, increment_text, case):
        plain, _, _, _ = execute(increment_text, case["tape"], case["start"])
        fast, _, _, _ = execute(
            increment_text, case["tape"], case["start"], optimize=True
        )
        assert fast.outcome == plain.outcome
        assert fast.steps == plain.steps
        assert [e.node for e in fast.trace] == [e.node for e in plain.trace]
        assert final_tape(fast.state) == final_tape(plain.state)

    def test_optimized_phrases_inline_words(self, increment_text):
        tree, stop, instructions = prepare(increment_text, optimize=True)
        if1 = statements(tree)[2]
        assert "is labeled 'one'" in instructions[if1].phrases()[0]
        p1 = statements(tree)[0]
        assert "label the" in instructions[p1].phrases()[0]
        assert "'point'" in instructions[p1].phrases()[0]

    @pytest.mark.parametrize(
        "case", EXPECTED_RUNS["cases"][:3], ids=lambda c: c["tape"]
    )
    def test_cautious_runs_agree(self, increment_text, case):
        plain, _, _, _ = execute(increment_text, case["tape"], case["start"])
        careful, _, _, _ = execute(
            increment_text, case["tape"], case["start"], cautious=True
        )
        assert careful.outcome == plain.outcome
        assert careful.trace == plain.trace

    def test_crashes_are_states_not_exceptions(self, increment_parts):
        tree, _, instructions = increment_parts
        state = initialize(tree, parse_tape("one"), "first", instructions)
        tree.graph.add_arrow(tree.root, "tape", tree.root, SEMANTIC)
        result = run(state)
        assert result.outcome == CRASHED
        assert state.situation.situation == NORMAL_CONDITION_VIOLATED

    def test_cautious_crash_is_structured(self, increment_parts):
        tree, _, instructions = increment_parts
        state = initialize(tree, parse_tape("one"), "first", instructions)
        state.cautious = True
        tree.graph.add_arrow(tree.root, "tape", tree.root, SEMANTIC)
        result = run(state)
        assert result.outcome == CRASHED
        report = state.situation
        assert report.situation == NORMAL_CONDITION_VIOLATED
        assert "not passable" in report.detail
        assert report.as_dict()["node"] == report.node


class TestTraceFormats:
    def test_text_lines(self, increment_text):
        result, _, _, _ = execute(increment_text, "one one", "last")
        lines = trace_text(result.trace).split("\n")
        assert len(lines) == 18
        assert lines[0] == "1 \"tape-alphabet\" follow the 'next' arrow"
        assert lines[-1] == "18 'stop' stop"

    def test_json_round_trip(self, increment_text):
        result, _, _, _ = execute(increment_text, "zero", "last")
        rows = json.loads(trace_json(result.trace))
        assert len(rows) == result.steps
        assert rows[0]["label"] == "tape-alphabet"
        assert rows[0]["tape"] is None
        changed = [r for r in rows if r["tape"] is not None]
        assert changed[0]["step"] == 2
