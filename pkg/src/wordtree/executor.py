"""Graph-walking executor: instructions in nodes, tape attachment, runs.

Instructions are data, not host code: each is a sequence of directions
over the path-formula proposition and action algebra, stored in a map
keyed by node id. Execution walks the flow graph from the root node and
performs the instruction found at every node reached. Crashes are
states, not exceptions: reaching a node without an instruction, running
an instruction out of directions without following an arrow, and
violating an action's normal-execution condition all mark the state
crashed with a structured report. In cautious mode each direction is
verified before it runs, so a latent violation is reported instead of
attempted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .control_flow import NEXT, NO, YES
from .graph import (
    CONTROL,
    SEMANTIC,
    SYNTACTIC,
    Action,
    CreateNodeWithArrowFromSource,
    CreateNodeWithArrowToTarget,
    FollowArrow,
    Inapplicable,
    LabelsEqual,
    NoArrowFrom,
    NoArrowTo,
    NormalConditionViolated,
    PathFormula,
    Proposition,
    ReassignArrow,
    RelabelNode,
    StartAmbiguous,
    Stop,
    Tree,
    apply_action,
    display_word,
    eval_proposition,
    normal_violation,
    parse_path,
    resolve,
)
from .semantics import STATEMENT, NodeClass, check_alphabet, check_labels, classify
from .tape import Tape, chain_text

RUNNING = "running"
STOPPED = "stopped"
CRASHED = "crashed"
BUDGET_EXHAUSTED = "budget_exhausted"

NO_INSTRUCTION = "NoInstruction"
DIRECTIONS_EXHAUSTED = "DirectionsExhausted"
NORMAL_CONDITION_VIOLATED = "NormalConditionViolated"

TAPE_ARROW = "tape"

TAPE_PATH = parse_path('"tape-alphabet"+tape')
LEFT_CELL_PATH = parse_path('"tape-alphabet"+tape-""')
RIGHT_CELL_PATH = parse_path('"tape-alphabet"+tape+""')
SYMBOL_PATH = parse_path('+""+is')
PRINT_WORD_PATH = parse_path("+\"'\"")


@dataclass(frozen=True)
class LabelIs:
    """Inlined comparison: the node at ``path`` carries exactly ``word``."""

    path: PathFormula
    word: str

    def phrase(self) -> str:
        return f"the {self.path} node is labeled {display_word(self.word)}"


@dataclass(frozen=True)
class WriteLabel:
    """Inlined print: write a fixed word onto the node at ``path``."""

    path: PathFormula
    word: str

    def phrase(self) -> str:
        return f"label the {self.path} node {display_word(self.word)}"


@dataclass(frozen=True)
class Act:
    """A direction that performs its action unconditionally."""

    action: Union[Action, WriteLabel]

    def phrase(self) -> str:
        return self.action.phrase()


@dataclass(frozen=True)
class Guarded:
    """A direction that performs its action only when the condition holds."""

    condition: Union[Proposition, LabelIs]
    then: Union[Action, WriteLabel]

    def phrase(self) -> str:
        return f"if {self.condition.phrase()}, then {self.then.phrase()}"


Direction = Union[Act, Guarded]


@dataclass(frozen=True)
class Instruction:
    directions: tuple[Direction, ...]

    def phrases(self) -> list[str]:
        return [d.phrase() for d in self.directions]


@dataclass(frozen=True)
class CrashReport:
    situation: str
    node: int
    detail: str

    def __str__(self) -> str:
        return f"{self.situation} at node {self.node}: {self.detail}"

    def as_dict(self) -> dict:
        return {"situation": self.situation, "node": self.node, "detail": self.detail}


@dataclass(frozen=True)
class TraceEntry:
    step: int
    node: int
    label: str
    direction: str
    tape: Optional[str] = None


@dataclass
class ExecState:
    tree: Tree
    instructions: dict[int, Instruction]
    current: int
    cautious: bool = False
    steps: int = 0
    status: str = RUNNING
    situation: Optional[CrashReport] = None
    trace: list[TraceEntry] = field(default_factory=list)
    last_tape: Optional[str] = None


@dataclass
class RunResult:
    outcome: str
    steps: int
    trace: list[TraceEntry]
    state: ExecState


def install_instructions(
    tree: Tree,
    stop: int,
    classes: Optional[dict[int, NodeClass]] = None,
    optimize: bool = False,
) -> dict[int, Instruction]:
    """Build the node-to-instruction map for an executable program tree.

    Exactly the root, the stop node, and the statement nodes carry
    instructions. With ``optimize`` set, if and print instructions get
    their operand word inlined instead of reading it from the syntactic
    subtree on every visit.
    """
    g = tree.graph
    classes = classes if classes is not None else classify(tree)

    def flow_arrows(node: int, label: str) -> int:
        return sum(
            1
            for _, a in g.out_arrows(node, kinds=(CONTROL,))
            if a.label == label
        )

    def require_flow(node: int, *labels: str) -> None:
        for label in labels:
            count = flow_arrows(node, label)
            if count != 1:
                raise ValueError(
                    f"node {node} needs exactly one {display_word(label)} "
                    f"arrow but has {count}; build control flow first"
                )

    follow_next = Instruction((Act(FollowArrow(NEXT)),))
    instructions: dict[int, Instruction] = {}
    require_flow(tree.root, NEXT)
    instructions[tree.root] = follow_next
    instructions[stop] = Instruction((Act(Stop()),))

    for node in g.nodes():
        if classes.get(node, NodeClass("other")).kind != STATEMENT:
            continue
        word = g.node_label(node)
        if word == "if":
            require_flow(node, YES, NO)
            if optimize:
                compared = g.node_label(
                    resolve(g, SYMBOL_PATH, current=node, kinds=(SYNTACTIC,))
                )
                condition: Union[Proposition, LabelIs] = LabelIs(TAPE_PATH, compared)
            else:
                condition = LabelsEqual(TAPE_PATH, SYMBOL_PATH)
            instructions[node] = Instruction(
                (Guarded(condition, FollowArrow(YES)), Act(FollowArrow(NO)))
            )
        elif word == "print":
            require_flow(node, NEXT)
            if optimize:
                printed = g.node_label(
                    resolve(g, PRINT_WORD_PATH, current=node, kinds=(SYNTACTIC,))
                )
                write: Union[Action, WriteLabel] = WriteLabel(TAPE_PATH, printed)
            else:
                write = RelabelNode(TAPE_PATH, PRINT_WORD_PATH)
            instructions[node] = Instruction((Act(write), Act(FollowArrow(NEXT))))
        elif word == "move":
            require_flow(node, NEXT)
            sideways = [
                a.label
                for _, a in g.out_arrows(node, kinds=(SYNTACTIC,))
                if a.label in ("left", "right")
            ]
            if len(sideways) != 1:
                raise ValueError(
                    f"move node {node} needs exactly one left or right arrow"
                )
            if sideways[0] == "left":
                expand = Guarded(
                    NoArrowTo("", TAPE_PATH),
                    CreateNodeWithArrowToTarget(TAPE_PATH),
                )
                reassign = ReassignArrow(TAPE_ARROW, LEFT_CELL_PATH)
            else:
                expand = Guarded(
                    NoArrowFrom("", TAPE_PATH),
                    CreateNodeWithArrowFromSource(TAPE_PATH),
                )
                reassign = ReassignArrow(TAPE_ARROW, RIGHT_CELL_PATH)
            instructions[node] = Instruction(
                (expand, Act(reassign), Act(FollowArrow(NEXT)))
            )
        else:
            require_flow(node, NEXT)
            instructions[node] = follow_next
    return instructions


def initialize(
    tree: Tree,
    tape: Tape,
    start: Union[str, int],
    instructions: dict[int, Instruction],
    cautious: bool = False,
) -> ExecState:
    """Attach a tape to the program tree and return the starting state.

    Copies the tape chain into the program graph, points a single
    semantic 'tape' arrow from the root at the chosen cell, and places
    the executor at the root. ``start`` is 'first', 'last', or a
    zero-based cell index. Refuses graphs that already carry a 'tape'
    arrow and programs whose label checks report errors or whose
    statements use undeclared tape words.
    """
    g = tree.graph
    problems = [d for d in check_labels(tree) if d.severity == "error"]
    problems += [d for d in check_alphabet(tree) if d.code == "AW2"]
    if problems:
        raise ValueError(
            "the program violates requirements: "
            + "; ".join(str(d) for d in problems)
        )
    if any(a.label == TAPE_ARROW for _, a in g.arrows()):
        raise ValueError("the graph already carries a 'tape' arrow")

    cells = tape.cells()
    if start == "first":
        index = 0
    elif start == "last":
        index = len(cells) - 1
    elif isinstance(start, int) and not isinstance(start, bool):
        index = start
    else:
        raise ValueError(f"unknown start position {start!r}")
    if not 0 <= index < len(cells):
        raise ValueError(f"start index {index} outside the {len(cells)}-cell tape")

    mapping = {}
    for node in tape.graph.nodes():
        mapping[node] = g.add_node(tape.graph.node_label(node))
    for _, arrow in tape.graph.arrows():
        g.add_arrow(mapping[arrow.src], arrow.label, mapping[arrow.dst], arrow.kind)
    scanned = mapping[cells[index]]
    g.add_arrow(tree.root, TAPE_ARROW, scanned, SEMANTIC)

    state = ExecState(tree, dict(instructions), tree.root, cautious)
    state.last_tape = chain_text(g, scanned)
    return state


def _locate(g, path: PathFormula, current: int) -> int:
    try:
        return resolve(g, path, current)
    except (StartAmbiguous, Inapplicable) as failure:
        raise NormalConditionViolated(
            f"path {path} is not passable: {failure}"
        ) from failure


def _evaluate(g, condition, current: int) -> bool:
    if isinstance(condition, LabelIs):
        return g.node_label(_locate(g, condition.path, current)) == condition.word
    return eval_proposition(g, condition, current)


def _perform(g, action, current: int) -> Optional[int]:
    if isinstance(action, WriteLabel):
        g.set_node_label(_locate(g, action.path, current), action.word)
        return current
    return apply_action(g, action, current)


def _item_violation(g, item, current: int) -> Optional[str]:
    if isinstance(item, (LabelIs, WriteLabel)):
        try:
            resolve(g, item.path, current)
            return None
        except (StartAmbiguous, Inapplicable):
            return f"path {item.path} is not passable"
    return normal_violation(g, item, current)


def _tape_text(g) -> Optional[str]:
    hits = [a.dst for _, a in g.arrows() if a.label == TAPE_ARROW]
    if len(hits) != 1:
        return None
    return chain_text(g, hits[0])


def _record(state: ExecState, node: int, label: str, phrase: str) -> None:
    snapshot = None
    text = _tape_text(state.tree.graph)
    if text is not None and text != state.last_tape:
        snapshot = text
        state.last_tape = text
    state.trace.append(TraceEntry(state.steps, node, label, phrase, snapshot))


def _crash(
    state: ExecState, situation: str, node: int, label: str, detail: str
) -> ExecState:
    state.status = CRASHED
    state.situation = CrashReport(situation, node, detail)
    state.trace.append(
        TraceEntry(state.steps, node, label, f"crash {situation}: {detail}")
    )
    return state


def step(state: ExecState) -> ExecState:
    """Execute the instruction at the current node; one step of a run.

    Directions run in order. A guard that evaluates false falls through
    to the next direction; a guard that evaluates true performs its
    action. The first FollowArrow or Stop performed ends the step, and
    an instruction must end that way or the state crashes.
    """
    if state.status != RUNNING:
        raise ValueError(f"cannot step a {state.status} state")
    g = state.tree.graph
    node = state.current
    label = g.node_label(node)
    state.steps += 1

    instruction = state.instructions.get(node)
    if instruction is None:
        return _crash(
            state,
            NO_INSTRUCTION,
            node,
            label,
            f"the {display_word(label)} node holds no instruction",
        )

    for direction in instruction.directions:
        condition = direction.condition if isinstance(direction, Guarded) else None
        action = direction.then if isinstance(direction, Guarded) else direction.action
        try:
            if condition is not None:
                if state.cautious:
                    problem = _item_violation(g, condition, node)
                    if problem is not None:
                        return _crash(state, NORMAL_CONDITION_VIOLATED, node, label, problem)
                if not _evaluate(g, condition, node):
                    continue
            if state.cautious:
                problem = _item_violation(g, action, node)
                if problem is not None:
                    return _crash(state, NORMAL_CONDITION_VIOLATED, node, label, problem)
            if isinstance(action, Stop):
                state.status = STOPPED
                _record(state, node, label, direction.phrase())
                return state
            if isinstance(action, FollowArrow):
                destination = _perform(g, action, node)
                assert destination is not None
                state.current = destination
                _record(state, node, label, direction.phrase())
                return state
            _perform(g, action, node)
        except NormalConditionViolated as failure:
            return _crash(state, NORMAL_CONDITION_VIOLATED, node, label, str(failure))
    return _crash(
        state,
        DIRECTIONS_EXHAUSTED,
        node,
        label,
        "the instruction ran out of directions without following an arrow",
    )


def run(state: ExecState, max_steps: int = 10_000) -> RunResult:
    """Step until the state stops, crashes, or exhausts the step budget."""
    while state.status == RUNNING and state.steps < max_steps:
        step(state)
    if state.status == STOPPED:
        outcome = STOPPED
    elif state.status == CRASHED:
        outcome = CRASHED
    else:
        outcome = BUDGET_EXHAUSTED
    return RunResult(outcome, state.steps, state.trace, state)


def final_tape(state: ExecState) -> Optional[str]:
    """The tape text after a run, or None if no tape arrow survives."""
    return _tape_text(state.tree.graph)


def trace_text(trace: list[TraceEntry]) -> str:
    """Line-oriented trace: step number, node label, direction phrase."""
    return "\n".join(
        f"{entry.step} {display_word(entry.label)} {entry.direction}"
        for entry in trace
    )


def trace_json(trace: list[TraceEntry]) -> str:
    return json.dumps(
        [
            {
                "step": entry.step,
                "node": entry.node,
                "label": entry.label,
                "direction": entry.direction,
                "tape": entry.tape,
            }
            for entry in trace
        ]
    )
