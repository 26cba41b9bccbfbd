"""Contraction trees and the staged evaluation engine.

A PNF formula becomes a tree whose inner nodes are its binary operators and
whose leaves are its literals; unary step operators are swallowed into the
edges. Every edge carries a transducer that maps the sequence produced below
the edge to the sequence the rest of the formula expects.

Contracting a leaf evaluates its literal through its edge, specializes the
parent operator on the known operand (one builder call), and splices the
sibling's edge, the specialized operator, and the parent's edge into a single
evaluated transducer. Leaves are numbered left to right; every stage removes
all odd-numbered leaves (left children first, then right children, so the
removals in one pass never touch each other), then halves the numbers. A tree
with L leaves therefore contracts in exactly ceil(log2 L) stages, and the
last leaf's edge maps its literal to the whole formula's sequence.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import builder
from .circuit import Transducer, apply, compose_evaluated, constants_are_sinks, identity, validate
from .errors import ContractionError, TraceError
from .formula import (
    And,
    BoundedRelease,
    BoundedSince,
    BoundedTrigger,
    BoundedUntil,
    Formula,
    Or,
    Release,
    Since,
    Trigger,
    UNARY_TEMPORAL,
    Until,
    atom_names,
    format_formula,
    is_literal,
    literal_parts,
    prune_bounds,
    subformula_occurrences,
    to_pnf,
)
from .trace import Trace, atom_sequence

ROOT = -1

_UNARY_TOKEN = {"Next": "X", "WeakNext": "wX", "Yesterday": "Y", "WeakYesterday": "wY"}

_PARTIAL_BINARY = {
    And: ("&", None),
    Or: ("|", None),
    Until: ("U", None),
    Release: ("R", None),
    Since: ("S", None),
    Trigger: ("T", None),
    BoundedUntil: ("U", "bounded"),
    BoundedRelease: ("R", "bounded"),
    BoundedSince: ("S", "bounded"),
    BoundedTrigger: ("T", "bounded"),
}


class ContractionTree:
    """Mutable contraction state over one trace.

    Nodes are identified by their subformula-occurrence index in the PNF
    formula; ROOT (-1) marks the region above the topmost node. `labels[v]`
    is the transducer on the edge from v's parent down to v, and
    `edge_formula[v]` is the subformula whose sequence that edge must emit
    when fed v's sequence (it differs from v's own formula exactly when the
    edge swallowed unary operators, and is inherited when edges merge).
    """

    __slots__ = (
        "trace",
        "n",
        "node_formula",
        "parent",
        "slot",
        "children",
        "labels",
        "edge_formula",
        "leaf_numbers",
        "literal_bits",
    )

    def __init__(self, trace: Trace):
        self.trace = trace
        self.n = len(trace)
        self.node_formula: dict[int, Formula] = {}
        self.parent: dict[int, int] = {}
        self.slot: dict[int, int] = {}
        self.children: dict[int, list[int]] = {}
        self.labels: dict[int, Transducer] = {}
        self.edge_formula: dict[int, Formula] = {}
        self.leaf_numbers: dict[int, int] = {}
        self.literal_bits: dict[int, tuple[bool, ...]] = {}

    def copy(self) -> "ContractionTree":
        t = ContractionTree.__new__(ContractionTree)
        t.trace = self.trace
        t.n = self.n
        t.node_formula = dict(self.node_formula)
        t.parent = dict(self.parent)
        t.slot = dict(self.slot)
        t.children = {k: list(v) for k, v in self.children.items()}
        t.labels = dict(self.labels)
        t.edge_formula = dict(self.edge_formula)
        t.leaf_numbers = dict(self.leaf_numbers)
        t.literal_bits = dict(self.literal_bits)
        return t

    def top(self) -> int:
        return self.children[ROOT][0]

    def is_leaf(self, v: int) -> bool:
        return v not in self.children

    def leaves_in_order(self) -> list[int]:
        """Leaves left to right (iterative in-order walk)."""
        out = []
        stack = [self.top()]
        while stack:
            v = stack.pop()
            ch = self.children.get(v)
            if ch is None:
                out.append(v)
            else:
                stack.extend(reversed(ch))
        return out


def init_tree(f: Formula, trace: Trace) -> ContractionTree:
    """Build the initial tree for a PNF formula over a trace.

    Unary operators never become nodes: each maximal unary chain is composed
    (innermost first) onto an identity transducer to label the edge to the
    first non-unary subformula beneath it.
    """
    occs = subformula_occurrences(f)  # raises FormulaError unless PNF
    tree = ContractionTree(trace)
    n = tree.n
    unary_idx = {
        o.index for o in occs if isinstance(o.formula, UNARY_TEMPORAL)
    }
    slot_index = {"left": 0, "right": 1, "child": 0, None: 0}
    for occ in occs:
        if occ.index in unary_idx:
            continue
        node = occ.index
        tree.node_formula[node] = occ.formula
        # climb through any unary ancestors, composing their shifts
        label = identity(n)
        top_formula = occ.formula
        p = occ.parent
        slot = occ.slot
        while p is not None and p in unary_idx:
            u = occs[p].formula
            # climbing outward: the shift just climbed must transform the
            # sequence after everything already in the label, i.e. compose on
            # the output side
            label = compose_evaluated(
                label, builder.build_shift(n, _UNARY_TOKEN[type(u).__name__])
            )
            top_formula = u
            slot = occs[p].slot
            p = occs[p].parent
        parent_node = ROOT if p is None else p
        tree.parent[node] = parent_node
        tree.slot[node] = slot_index[slot]
        tree.labels[node] = label
        tree.edge_formula[node] = top_formula
        if is_literal(occ.formula):
            name, negated = literal_parts(occ.formula)
            tree.literal_bits[node] = atom_sequence(trace, name, negated)
        else:
            tree.children[node] = [-2, -2]
    tree.children[ROOT] = [-2]
    for occ in occs:
        if occ.index in unary_idx:
            continue
        node = occ.index
        tree.children[tree.parent[node]][tree.slot[node]] = node
    for v, ch in tree.children.items():
        if -2 in ch:
            raise ContractionError(f"node {v} is missing a child")
    for num, leaf in enumerate(tree.leaves_in_order()):
        tree.leaf_numbers[leaf] = num
    return tree


@dataclass(frozen=True)
class _Plan:
    leaf: int
    parent: int
    sibling: int
    grandparent: int
    parent_slot: int
    new_label: Transducer


def _build_partial(f: Formula, known_side: str, known, n: int) -> Transducer:
    kind = _PARTIAL_BINARY.get(type(f))
    if kind is None:
        raise ContractionError(f"not a binary operator node: {format_formula(f)}")
    op, flavour = kind
    if op in ("&", "|"):
        return builder.build_boolean(n, op, known)
    if flavour == "bounded":
        return builder.build_bounded(n, op, f.bound, known_side, known)
    return builder.build_unbounded(n, op, known_side, known)


def _plan(tree: ContractionTree, leaf: int) -> _Plan:
    if leaf not in tree.node_formula or not tree.is_leaf(leaf):
        raise ContractionError(f"node {leaf} is not a live leaf")
    p = tree.parent[leaf]
    if p == ROOT:
        raise ContractionError("cannot contract the only remaining leaf")
    sibling = tree.children[p][1 - tree.slot[leaf]]
    grandparent = tree.parent[p]
    known = apply(tree.labels[leaf], tree.literal_bits[leaf])
    side = "left" if tree.slot[leaf] == 0 else "right"
    partial = _build_partial(tree.node_formula[p], side, known, tree.n)
    lifted = compose_evaluated(partial, tree.labels[p])
    new_label = compose_evaluated(tree.labels[sibling], lifted)
    return _Plan(leaf, p, sibling, grandparent, tree.slot[p], new_label)


def _apply_plan(tree: ContractionTree, plan: _Plan) -> None:
    tree.edge_formula[plan.sibling] = tree.edge_formula[plan.parent]
    tree.labels[plan.sibling] = plan.new_label
    tree.children[plan.grandparent][plan.parent_slot] = plan.sibling
    tree.parent[plan.sibling] = plan.grandparent
    tree.slot[plan.sibling] = plan.parent_slot
    for node in (plan.leaf, plan.parent):
        tree.node_formula.pop(node)
        tree.parent.pop(node)
        tree.slot.pop(node)
        tree.labels.pop(node)
        tree.edge_formula.pop(node)
        tree.children.pop(node, None)
    tree.literal_bits.pop(plan.leaf, None)
    tree.leaf_numbers.pop(plan.leaf, None)


def contract_step(tree: ContractionTree, leaf: int) -> ContractionTree:
    """One leaf contraction, returning a new tree (the input is unchanged)."""
    out = tree.copy()
    _apply_plan(out, _plan(tree, leaf))
    return out


@dataclass
class ContractionRecord:
    """What a run did, for tests and the DOT dumper."""

    initial_leaves: int = 0
    stages: int = 0
    leaf_counts: list[int] = field(default_factory=list)
    selections: list[tuple[int, int, tuple[int, ...]]] = field(default_factory=list)
    final_gates: int = 0  # arena size of the last remaining edge label


def run_contraction(
    tree: ContractionTree,
    workers: Optional[int] = None,
    record: Optional[ContractionRecord] = None,
    on_stage: Optional[Callable[[ContractionTree, int], None]] = None,
) -> tuple[bool, ...]:
    """Contract to a single leaf and return the whole formula's sequence.

    Each stage removes the odd-numbered leaves: first those that are left
    children, then (re-examining the tree) those that are right children.
    Within a pass the removals are structurally disjoint, so their plans are
    computed from the same tree snapshot (in parallel when workers > 1) and
    applied in leaf-number order; the result never depends on scheduling.
    """
    t = tree.copy()
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise ContractionError("workers must be at least 1")
    numbers = t.leaf_numbers
    initial = len(numbers)
    if initial == 0:
        raise ContractionError("tree has no leaves")
    budget = max(1, math.ceil(math.log2(initial))) if initial > 1 else 0
    if record is not None:
        record.initial_leaves = initial
        record.leaf_counts.append(initial)
    if on_stage is not None:
        on_stage(t, 0)
    stage = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while len(numbers) > 1:
            stage += 1
            if stage > budget:
                raise ContractionError(
                    f"stage budget {budget} exceeded on {initial} leaves"
                )
            for half in (0, 1):
                selected = sorted(
                    (leaf for leaf, num in numbers.items() if num & 1 and t.slot[leaf] == half),
                    key=numbers.__getitem__,
                )
                if not selected:
                    continue
                selected_numbers = tuple(numbers[lf] for lf in selected)
                if pool is not None and len(selected) > 1:
                    plans = list(pool.map(lambda lf: _plan(t, lf), selected))
                else:
                    plans = [_plan(t, lf) for lf in selected]
                _assert_disjoint(plans)
                for plan in plans:
                    _apply_plan(t, plan)
                if record is not None:
                    record.selections.append((stage, half, selected_numbers))
            for leaf in numbers:
                if numbers[leaf] & 1:
                    raise ContractionError(f"leaf {leaf} survived stage {stage} odd")
            for leaf in numbers:
                numbers[leaf] >>= 1
            if record is not None:
                record.leaf_counts.append(len(numbers))
            if on_stage is not None:
                on_stage(t, stage)
    finally:
        if pool is not None:
            pool.shutdown(wait=False)
    last = t.top()
    if record is not None:
        record.stages = stage
        record.final_gates = len(t.labels[last].circuit)
    return apply(t.labels[last], t.literal_bits[last])


def _assert_disjoint(plans: list[_Plan]) -> None:
    removed: set[int] = set()
    for p in plans:
        for node in (p.leaf, p.parent):
            if node in removed:
                raise ContractionError("overlapping contraction plans")
            removed.add(node)
    rewritten: set[int] = set()
    for p in plans:
        if p.sibling in removed or p.sibling in rewritten:
            raise ContractionError("overlapping contraction plans")
        rewritten.add(p.sibling)
        if p.grandparent != ROOT and p.grandparent in removed:
            raise ContractionError("overlapping contraction plans")


def verify_tree(tree: ContractionTree) -> None:
    """Check the tree invariants; raises ContractionError on violation.

    Structure: ROOT has one child, inner nodes two, every parent/slot/child
    pointer agrees, leaves are exactly the literal nodes and carry numbers.
    Labels: every edge holds a transducer with n inputs and n outputs whose
    inputs are exactly its variable gates, acyclic, constants only at sinks.
    Semantics: feeding a node's own sequence through its edge label yields
    the sequence of the subformula the edge stands for.
    """
    from .semantics import eval_seq  # referee only; the engine never calls this

    n = tree.n
    if ROOT not in tree.children or len(tree.children[ROOT]) != 1:
        raise ContractionError("ROOT must have exactly one child")
    live = set(tree.node_formula)
    seen: set[int] = set()
    stack = [tree.top()]
    while stack:
        v = stack.pop()
        if v not in live or v in seen:
            raise ContractionError(f"node {v} is dangling or repeated")
        seen.add(v)
        ch = tree.children.get(v)
        if ch is None:
            if not is_literal(tree.node_formula[v]):
                raise ContractionError(f"leaf {v} is not a literal")
            if v not in tree.leaf_numbers or v not in tree.literal_bits:
                raise ContractionError(f"leaf {v} is missing its number or bits")
        else:
            if len(ch) != 2:
                raise ContractionError(f"inner node {v} must have two children")
            if is_literal(tree.node_formula[v]):
                raise ContractionError(f"inner node {v} is a literal")
            for idx, c in enumerate(ch):
                if tree.parent.get(c) != v or tree.slot.get(c) != idx:
                    raise ContractionError(f"child pointers of {v} are inconsistent")
                stack.append(c)
    if seen != live:
        raise ContractionError("tree does not reach every live node")
    nums = list(tree.leaf_numbers.values())
    if len(set(nums)) != len(nums):
        raise ContractionError("leaf numbers are not distinct")
    for v in live:
        label = tree.labels.get(v)
        if label is None:
            raise ContractionError(f"edge to {v} has no label")
        if label.arity_in != n or label.arity_out != n:
            raise ContractionError(f"edge to {v} is not an n->n transducer")
        validate(label)
        if not constants_are_sinks(label.circuit):
            raise ContractionError(f"edge to {v} is not evaluated")
        child_seq = eval_seq(tree.trace, tree.node_formula[v])
        want = eval_seq(tree.trace, tree.edge_formula[v])
        if apply(label, child_seq) != want:
            raise ContractionError(f"edge to {v} does not compute its subformula")


@dataclass(frozen=True)
class CheckResult:
    satisfied: bool
    sequence: tuple[bool, ...]


def check(
    f: Formula,
    trace: Trace,
    engine: str = "circuit",
    workers: Optional[int] = None,
    record: Optional[ContractionRecord] = None,
) -> CheckResult:
    """Decide whether the trace satisfies the formula (at position 0).

    engine="circuit" runs the contraction pipeline on the pruned PNF of f;
    engine="naive" evaluates the defining quantifiers directly. Both return
    the full satisfaction sequence.
    """
    if len(trace) == 0:
        raise TraceError("cannot check an empty trace")
    for name in sorted(atom_names(f)):
        atom_sequence(trace, name)  # raises UnknownProposition early
    if engine == "naive":
        from .semantics import eval_seq

        seq = eval_seq(trace, f)
    elif engine == "circuit":
        g = prune_bounds(to_pnf(f), len(trace))
        tree = init_tree(g, trace)
        seq = run_contraction(tree, workers=workers, record=record)
    else:
        raise ContractionError(f"unknown engine {engine!r}")
    return CheckResult(seq[0], seq)
