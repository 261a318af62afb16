"""Syntactic schemas: tree families, uni-labeledness analysis, grammar export.

A schema is a small digraph over named nodes. AND arrows prescribe
mandatory or optional children whose labels are drawn from closed-form
regular expressions; OR arrows offer alternative refinements of a node.
Repeatedly expanding nodes that still carry schema names yields the
family of trees the schema denotes. The checks in this module decide,
without generating anything, whether every member of that family is
uni-labeled, and the exporter prints the schema as EBNF productions.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Optional, Union

from .graph import LabeledGraph, Tree, is_mla_word
from .graph import elementary_cycles as graph_cycles

ATOMIC = "atomic"
AND_NODE = "and"
OR_NODE = "or"
MIXED = "mixed"

_LOWER = "abcdefghijklmnopqrstuvwxyz"


class BudgetExceeded(Exception):
    """Tree generation ran out of node budget with schema names remaining."""


@dataclass(frozen=True)
class Literal:
    """Pattern matching exactly one word (possibly the empty word)."""

    word: str = ""

    def matches(self, word: str) -> bool:
        return word == self.word

    def sample(self, rng: random.Random) -> str:
        return self.word

    def placeholder(self) -> str:
        return self.word

    def to_text(self) -> str:
        return f"'{self.word}'"


@dataclass(frozen=True)
class Alternation:
    """Pattern matching any one of a finite set of words."""

    words: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "words", frozenset(self.words))
        if not self.words:
            raise ValueError("alternation needs at least one word")

    def matches(self, word: str) -> bool:
        return word in self.words

    def sample(self, rng: random.Random) -> str:
        return rng.choice(sorted(self.words))

    def placeholder(self) -> str:
        return min(self.words)

    def to_text(self) -> str:
        return "(" + " | ".join(f"'{w}'" for w in sorted(self.words)) + ")"


@dataclass(frozen=True)
class LowerWord:
    """Pattern matching any non-empty word of lowercase letters."""

    def matches(self, word: str) -> bool:
        return bool(word) and all(c in _LOWER for c in word)

    def sample(self, rng: random.Random) -> str:
        return "".join(rng.choice(_LOWER) for _ in range(rng.randint(1, 6)))

    def placeholder(self) -> str:
        return "x"

    def to_text(self) -> str:
        return "[a-z]+"


RegexSpec = Union[Literal, Alternation, LowerWord]


def disjoint(a: RegexSpec, b: RegexSpec) -> bool:
    """Whether two label patterns denote non-overlapping word sets."""
    match (a, b):
        case (Literal(wa), Literal(wb)):
            return wa != wb
        case (Literal(w), Alternation(ws)) | (Alternation(ws), Literal(w)):
            return w not in ws
        case (Literal(w), LowerWord()) | (LowerWord(), Literal(w)):
            return not LowerWord().matches(w)
        case (Alternation(wa), Alternation(wb)):
            return not (wa & wb)
        case (Alternation(ws), LowerWord()) | (LowerWord(), Alternation(ws)):
            return not any(LowerWord().matches(w) for w in ws)
        case (LowerWord(), LowerWord()):
            return False
    raise TypeError(f"not label patterns: {a!r}, {b!r}")


@dataclass(frozen=True)
class SchemaNode:
    """A named node. ``number`` is its own slot in the node's word order."""

    name: str
    label: RegexSpec = Literal("")
    number: Optional[int] = None


@dataclass(frozen=True)
class AndArrow:
    """A child prescription: label pattern, optionality, word-order slot.

    ``suffix`` marks arrows whose label is written after the child in the
    linear word order (closing quotes, closing braces, label colons).
    """

    src: str
    dst: str
    label: RegexSpec = Literal("")
    optional: bool = False
    order: Optional[int] = None
    suffix: bool = False


@dataclass(frozen=True)
class OrArrow:
    """An alternative refinement of the source node."""

    src: str
    dst: str


class Schema:
    """Named nodes plus AND/OR arrows. Declaration order is significant:
    it fixes production order in exports and choice order in generation."""

    def __init__(self) -> None:
        self._nodes: dict[str, SchemaNode] = {}
        self._and: list[AndArrow] = []
        self._or: list[OrArrow] = []

    def add_node(self, name: str, label: RegexSpec = Literal(""), number: Optional[int] = None) -> SchemaNode:
        if not is_mla_word(name):
            raise ValueError(f"schema name {name!r} must be uppercase letters and digits")
        if name in self._nodes:
            raise ValueError(f"duplicate schema name {name!r}")
        node = SchemaNode(name, label, number)
        self._nodes[name] = node
        return node

    def add_and_arrow(
        self,
        src: str,
        dst: str,
        label: RegexSpec = Literal(""),
        optional: bool = False,
        order: Optional[int] = None,
        suffix: bool = False,
    ) -> AndArrow:
        self._require(src)
        self._require(dst)
        arrow = AndArrow(src, dst, label, optional, order, suffix)
        self._and.append(arrow)
        return arrow

    def add_or_arrow(self, src: str, dst: str) -> OrArrow:
        self._require(src)
        self._require(dst)
        arrow = OrArrow(src, dst)
        self._or.append(arrow)
        return arrow

    def _require(self, name: str) -> None:
        if name not in self._nodes:
            raise ValueError(f"unknown schema node {name!r}")

    def names(self) -> list[str]:
        return list(self._nodes)

    def has_node(self, name: str) -> bool:
        return name in self._nodes

    def node(self, name: str) -> SchemaNode:
        self._require(name)
        return self._nodes[name]

    def and_arrows(self, src: Optional[str] = None) -> list[AndArrow]:
        if src is None:
            return list(self._and)
        return [a for a in self._and if a.src == src]

    def or_arrows(self, src: Optional[str] = None) -> list[OrArrow]:
        if src is None:
            return list(self._or)
        return [a for a in self._or if a.src == src]

    def or_targets(self, name: str) -> list[str]:
        return [a.dst for a in self._or if a.src == name]

    def node_class(self, name: str) -> str:
        self._require(name)
        has_and = any(a.src == name for a in self._and)
        has_or = any(a.src == name for a in self._or)
        if has_and and has_or:
            return MIXED
        if has_and:
            return AND_NODE
        if has_or:
            return OR_NODE
        return ATOMIC


@dataclass
class ValidationReport:
    errors: list[str]
    classes: dict[str, str]

    @property
    def ok(self) -> bool:
        return not self.errors


def _min_sizes(schema: Schema) -> dict[str, float]:
    """Smallest node count of a fully expanded tree rooted at each name.

    Infinity means the name admits no finite tree at all. With a graft
    expansion the expanded node and the root of the chosen alternative
    are one and the same node, so an OR choice adds no node of its own.
    """
    size: dict[str, float] = {name: math.inf for name in schema.names()}
    for _ in range(len(size) + 1):
        changed = False
        for name in schema.names():
            mandatory = sum(
                size[a.dst] for a in schema.and_arrows(src=name) if not a.optional
            )
            targets = schema.or_targets(name)
            if targets:
                candidate = mandatory + min(size[t] for t in targets)
            else:
                candidate = mandatory + 1
            if candidate < size[name]:
                size[name] = candidate
                changed = True
        if not changed:
            break
    return size


def validate(schema: Schema) -> ValidationReport:
    """Structural sanity: classify every node and report defects.

    Defects: an OR-bearing node with a non-empty own label (the label
    would be overwritten by every choice), parallel OR arrows, and nodes
    that admit no finite tree (for example a mandatory AND loop).
    """
    errors: list[str] = []
    classes = {name: schema.node_class(name) for name in schema.names()}
    for name in schema.names():
        node = schema.node(name)
        if schema.or_targets(name) and node.label != Literal(""):
            errors.append(
                f"node {name}: a node with OR arrows must carry the empty label,"
                f" not {node.label.to_text()}"
            )
    seen: set[tuple[str, str]] = set()
    for arrow in schema.or_arrows():
        pair = (arrow.src, arrow.dst)
        if pair in seen:
            errors.append(f"parallel OR arrows {arrow.src} -> {arrow.dst}")
        seen.add(pair)
    sizes = _min_sizes(schema)
    for name in schema.names():
        if math.isinf(sizes[name]):
            errors.append(f"node {name} is useless for finite trees")
    return ValidationReport(errors, classes)


@dataclass(frozen=True)
class AndConflict:
    """Two AND arrows from one node whose label patterns overlap."""

    node: str
    first: AndArrow
    second: AndArrow


def check_and_condition(schema: Schema) -> list[AndConflict]:
    """AND condition: per node, AND-arrow label patterns are pairwise disjoint."""
    conflicts = []
    for name in schema.names():
        for a, b in itertools.combinations(schema.and_arrows(src=name), 2):
            if not disjoint(a.label, b.label):
                conflicts.append(AndConflict(name, a, b))
    return conflicts


def _successors(schema: Schema) -> dict[str, set[str]]:
    succ: dict[str, set[str]] = {name: set() for name in schema.names()}
    for a in schema.and_arrows():
        succ[a.src].add(a.dst)
    for o in schema.or_arrows():
        succ[o.src].add(o.dst)
    return succ


def elementary_cycles(schema: Schema) -> list[tuple[str, ...]]:
    """All elementary directed cycles, each rotated to start at its least name."""
    return graph_cycles(_successors(schema))


def _cycle_steps(cycle: tuple[str, ...]) -> list[tuple[str, str]]:
    return [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def or_bearing_cycles(schema: Schema) -> list[tuple[str, ...]]:
    """Elementary cycles that traverse at least one OR arrow."""
    or_pairs = {(o.src, o.dst) for o in schema.or_arrows()}
    return [
        cycle
        for cycle in elementary_cycles(schema)
        if any(step in or_pairs for step in _cycle_steps(cycle))
    ]


def check_and_cycle_condition(schema: Schema) -> list[tuple[str, ...]]:
    """AND-cycle condition: every OR-bearing cycle passes through an AND node.

    Pairs pushed along OR arrows stop at AND nodes (no OR arrows leave
    them), so an empty result guarantees that pair propagation cannot
    circulate forever.
    """
    return [
        cycle
        for cycle in or_bearing_cycles(schema)
        if not any(schema.node_class(name) == AND_NODE for name in cycle)
    ]


Pair = tuple[str, RegexSpec]


@dataclass(frozen=True)
class PairConflict:
    """Two label pairs meeting at one node with overlapping patterns."""

    node: str
    first: Pair
    second: Pair


@dataclass
class PairReport:
    pairs: dict[str, set[Pair]]
    conflicts: list[PairConflict]

    @property
    def ok(self) -> bool:
        return not self.conflicts


def propagate_pairs(schema: Schema) -> PairReport:
    """Push (origin, label pattern) pairs along OR arrows and look for clashes.

    Every AND arrow seeds a pair at its origin; OR arrows carry pairs
    onward because a graft merges the refined node with the alternative's
    root, so both nodes' arrows end up on one tree node. A node where two
    accumulated pairs overlap could receive two equally labeled arrows.
    No conflicts anywhere means the whole family is uni-labeled.
    """
    stuck = check_and_cycle_condition(schema)
    if stuck:
        pretty = ", ".join("-".join(cycle) for cycle in stuck)
        raise ValueError(f"pair propagation would circulate forever around: {pretty}")
    pairs: dict[str, set[Pair]] = {name: set() for name in schema.names()}
    work: deque[tuple[str, Pair]] = deque()
    for arrow in schema.and_arrows():
        pair = (arrow.src, arrow.label)
        if pair not in pairs[arrow.src]:
            pairs[arrow.src].add(pair)
            work.append((arrow.src, pair))
    while work:
        name, pair = work.popleft()
        for arrow in schema.or_arrows(src=name):
            if pair not in pairs[arrow.dst]:
                pairs[arrow.dst].add(pair)
                work.append((arrow.dst, pair))
    conflicts = []
    for name in schema.names():
        settled = sorted(pairs[name], key=lambda p: (p[0], p[1].to_text()))
        for p, q in itertools.combinations(settled, 2):
            if not disjoint(p[1], q[1]):
                conflicts.append(PairConflict(name, p, q))
    return PairReport(pairs, conflicts)


def uni_labeled_family(schema: Schema) -> bool:
    """Whether the checks guarantee that every generated tree is uni-labeled."""
    if not validate(schema).ok:
        return False
    if check_and_condition(schema):
        return False
    if check_and_cycle_condition(schema):
        return False
    return propagate_pairs(schema).ok


def _instantiate(spec: RegexSpec, rng: Optional[random.Random]) -> str:
    return spec.placeholder() if rng is None else spec.sample(rng)


def expansions(schema: Schema, name: str, word_source: Optional[random.Random] = None) -> list[Tree]:
    """All one-step expansions of ``name``: each OR choice crossed with
    each subset of optional AND arrows. Open label patterns are filled by
    ``word_source`` when given and by fixed placeholder words otherwise,
    so the list's length counts structure, not wordings."""
    node = schema.node(name)
    ands = schema.and_arrows(src=name)
    optionals = [a for a in ands if a.optional]
    targets = schema.or_targets(name)
    result = []
    root_labels = targets if targets else [None]
    for root_label in root_labels:
        for mask in range(1 << len(optionals)):
            g = LabeledGraph()
            if root_label is None:
                root = g.add_node(_instantiate(node.label, word_source))
            else:
                root = g.add_node(root_label)
            opt_index = 0
            for arrow in ands:
                if arrow.optional:
                    take = mask >> opt_index & 1
                    opt_index += 1
                    if not take:
                        continue
                child = g.add_node(arrow.dst)
                g.add_arrow(root, _instantiate(arrow.label, word_source), child)
            result.append(Tree(g, root))
    return result


def generate_sytr(
    schema: Schema,
    root_name: str,
    word_source: Optional[random.Random] = None,
    node_budget: int = 500,
) -> Tree:
    """Grow a tree from ``root_name`` until no node carries a schema name.

    Each step grafts a random one-step expansion onto a pending node: the
    node is relabeled with the chosen alternative (or an instance of its
    own label pattern) and prescribed children are attached. Choices that
    could not be finished within ``node_budget`` nodes are never taken;
    if no choice fits, BudgetExceeded is raised.
    """
    report = propagate_pairs(schema)
    if report.conflicts:
        raise ValueError("schema admits clashing arrow labels; refusing to generate")
    rng = word_source if word_source is not None else random.Random(0)
    sizes = _min_sizes(schema)
    g = LabeledGraph()
    root = g.add_node(schema.node(root_name).name)
    pending: deque[int] = deque([root])
    reserve = sizes[root_name] - 1
    while pending:
        current = pending.popleft()
        name = g.node_label(current)
        node = schema.node(name)
        ands = schema.and_arrows(src=name)
        optionals = [a for a in ands if a.optional]
        mandatory_growth = sum(sizes[a.dst] for a in ands if not a.optional)
        targets = schema.or_targets(name)
        reserve -= sizes[name] - 1
        candidates = []
        for root_label in (targets or [None]):
            root_growth = sizes[root_label] - 1 if root_label is not None else 0
            for mask in range(1 << len(optionals)):
                optional_growth = sum(
                    sizes[a.dst]
                    for i, a in enumerate(optionals)
                    if mask >> i & 1
                )
                projected = (
                    g.node_count
                    + reserve
                    + root_growth
                    + mandatory_growth
                    + optional_growth
                )
                if projected <= node_budget:
                    candidates.append((root_label, mask))
        if not candidates:
            raise BudgetExceeded(
                f"no expansion of {name} fits within {node_budget} nodes"
            )
        root_label, mask = rng.choice(candidates)
        if root_label is None:
            g.set_node_label(current, node.label.sample(rng))
        else:
            g.set_node_label(current, root_label)
            pending.append(current)
            reserve += sizes[root_label] - 1
        opt_index = 0
        for arrow in ands:
            if arrow.optional:
                take = mask >> opt_index & 1
                opt_index += 1
                if not take:
                    continue
            child = g.add_node(arrow.dst)
            g.add_arrow(current, arrow.label.sample(rng), child)
            pending.append(child)
            reserve += sizes[arrow.dst] - 1
    return Tree(g, root)


def _production(schema: Schema, name: str) -> str:
    node = schema.node(name)
    ands = schema.and_arrows(src=name)
    targets = schema.or_targets(name)
    own = "" if node.label == Literal("") else node.label.to_text()
    if targets:
        group = targets[0] if len(targets) == 1 else "(" + " | ".join(targets) + ")"
        own = f"{own} {group}".strip()
    number = node.number
    if number is None:
        if ands:
            raise ValueError(f"node {name}: missing numbering")
        number = 1
    parts = [(number, own)]
    for arrow in ands:
        if arrow.order is None:
            raise ValueError(f"arrow {arrow.src} -> {arrow.dst}: missing numbering")
        label = "" if arrow.label == Literal("") else arrow.label.to_text()
        if arrow.suffix:
            text = f"{arrow.dst} {label}".strip()
        else:
            text = f"{label} {arrow.dst}".strip()
        if arrow.optional:
            text = f"({text})?"
        parts.append((arrow.order, text))
    parts.sort(key=lambda item: item[0])
    right = " ".join(text for _, text in parts if text)
    return f"{name} ::= {right or chr(39) * 2}"


def export_grammar(schema: Schema) -> str:
    """One EBNF production per node, in declaration order.

    Parts are laid out by their numbers; suffix arrow labels follow the
    child name; optional parts are wrapped in (...)?; empty literals are
    omitted except for an otherwise empty right-hand side.
    """
    return "\n".join(_production(schema, name) for name in schema.names())


def _spec_to_obj(spec: RegexSpec) -> object:
    match spec:
        case Literal(word):
            return {"kind": "literal", "word": word}
        case Alternation(words):
            return {"kind": "one-of", "words": sorted(words)}
        case LowerWord():
            return {"kind": "lower-word"}
    raise TypeError(f"not a label pattern: {spec!r}")


def _spec_from_obj(obj: object) -> RegexSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"bad label pattern object: {obj!r}")
    if obj["kind"] == "literal":
        return Literal(obj["word"])
    if obj["kind"] == "one-of":
        return Alternation(frozenset(obj["words"]))
    if obj["kind"] == "lower-word":
        return LowerWord()
    raise ValueError(f"bad label pattern kind: {obj['kind']!r}")


def schema_to_json(schema: Schema) -> str:
    """Serialize a schema so it can be stored and reloaded."""
    payload = {
        "nodes": [
            {
                "name": node.name,
                "label": _spec_to_obj(node.label),
                "number": node.number,
            }
            for node in (schema.node(n) for n in schema.names())
        ],
        "and_arrows": [
            {
                "from": a.src,
                "to": a.dst,
                "label": _spec_to_obj(a.label),
                "optional": a.optional,
                "order": a.order,
                "suffix": a.suffix,
            }
            for a in schema.and_arrows()
        ],
        "or_arrows": [{"from": o.src, "to": o.dst} for o in schema.or_arrows()],
    }
    return json.dumps(payload, indent=2)


def schema_from_json(text: str) -> Schema:
    """Inverse of :func:`schema_to_json`."""
    payload = json.loads(text)
    schema = Schema()
    for node in payload["nodes"]:
        schema.add_node(node["name"], _spec_from_obj(node["label"]), node.get("number"))
    for a in payload.get("and_arrows", ()):
        schema.add_and_arrow(
            a["from"],
            a["to"],
            _spec_from_obj(a["label"]),
            optional=a.get("optional", False),
            order=a.get("order"),
            suffix=a.get("suffix", False),
        )
    for o in payload.get("or_arrows", ()):
        schema.add_or_arrow(o["from"], o["to"])
    return schema


def turingol_schema() -> Schema:
    """The built-in schema for the Turingol surface language."""
    s = Schema()
    s.add_node("I", LowerWord(), number=1)
    s.add_node("OS", Literal("one-square"), number=1)
    s.add_node("DOT", Literal("."), number=1)
    s.add_node("LD", LowerWord(), number=1)
    s.add_node("DL", LowerWord(), number=1)
    s.add_node("STR", Literal("'"), number=1)
    s.add_node("A", Literal("the-tape-symbol"), number=1)
    s.add_node("SG", Literal("go"), number=1)
    s.add_node("SI", Literal("if"), number=1)
    s.add_node("SP", Literal("print"), number=1)
    s.add_node("SM", Literal("move"), number=1)
    s.add_node("SE", Literal(""), number=1)
    s.add_node("SC", Literal("{"), number=1)
    s.add_node("S", Literal(""), number=2)
    s.add_node("L", Literal(""), number=1)
    s.add_node("P", Literal("tape-alphabet"), number=1)
    s.add_and_arrow("LD", "LD", Literal(":"), optional=True, order=2)
    s.add_and_arrow("DL", "DL", Literal(","), optional=True, order=2)
    s.add_and_arrow("STR", "I", Literal("'"), order=2, suffix=True)
    s.add_and_arrow("A", "STR", Literal("is"), order=2)
    s.add_and_arrow("SG", "I", Literal("to"), order=2)
    s.add_and_arrow("SI", "A", Literal(""), order=2)
    s.add_and_arrow("SI", "S", Literal("then"), order=3)
    s.add_and_arrow("SP", "STR", Literal(""), order=2)
    s.add_and_arrow("SM", "OS", Alternation(frozenset({"left", "right"})), order=2)
    s.add_and_arrow("SC", "L", Literal("}"), order=2, suffix=True)
    s.add_and_arrow("S", "LD", Literal(":"), optional=True, order=1, suffix=True)
    s.add_and_arrow("L", "L", Literal(";"), optional=True, order=2)
    s.add_and_arrow("P", "DL", Literal("is"), order=2)
    s.add_and_arrow("P", "L", Literal(";"), order=3)
    s.add_and_arrow("P", "DOT", Literal(""), order=4)
    for target in ("SG", "SI", "SP", "SM", "SE", "SC"):
        s.add_or_arrow("S", target)
    s.add_or_arrow("L", "S")
    return s
