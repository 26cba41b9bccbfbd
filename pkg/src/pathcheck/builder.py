"""Trace-specialized transducer constructions, one per operator shape.

Each builder takes the known operand's bit sequence (already evaluated along
the trace) and returns a transducer mapping the unknown operand's sequence to
the operator's sequence. Gate layout is fixed and documented per builder so
tests can address gates by position; variables always come first.
"""

from __future__ import annotations

from . import circuit as cir
from .circuit import Circuit, Transducer, constant_circuit, evaluate
from .errors import BuildError
from .trace import Trace, atom_sequence

FUTURE_OPS = ("U", "R")
PAST_OPS = ("S", "T")
BINARY_OPS = FUTURE_OPS + PAST_OPS
SHIFT_OPS = ("X", "wX", "Y", "wY")
BOOLEAN_OPS = ("&", "|")


def build_literal(trace: Trace, name: str, negated: bool = False) -> Transducer:
    """Arity 0 -> n: the constant circuit of one literal's bit sequence."""
    return constant_circuit(atom_sequence(trace, name, negated))


def build_shift(n: int, op: str) -> Transducer:
    """One-step shift: output i reads the input at i+1 (X/wX) or i-1 (Y/wY);
    a missing neighbour reads as False for strong forms, True for weak forms.

    Layout: variables 0..n-1, outputs n..2n-1 (output i is gate n+i).
    """
    if op not in SHIFT_OPS:
        raise BuildError(f"unknown shift operator {op!r}")
    if n < 1:
        raise BuildError("arity must be at least 1")
    c = Circuit()
    for _ in range(n):
        c.add_var()
    pad = op in ("wX", "wY")
    future = op in ("X", "wX")
    for i in range(n):
        j = i + 1 if future else i - 1
        if 0 <= j < n:
            c.add_id(j)
        else:
            c.add_const(pad)
    return Transducer(c, tuple(range(n)), tuple(range(n, 2 * n)))


def build_boolean(n: int, op: str, known) -> Transducer:
    """Conjunction/disjunction with one operand known.

    Output i is the constant when known[i] decides the result, otherwise an
    Id of variable i. Layout as in build_shift.
    """
    if op not in BOOLEAN_OPS:
        raise BuildError(f"unknown boolean operator {op!r}")
    known = tuple(bool(b) for b in known)
    n = _check_len(n, known)
    c = Circuit()
    for _ in range(n):
        c.add_var()
    for i in range(n):
        if op == "|":
            if known[i]:
                c.add_const(True)
            else:
                c.add_id(i)
        else:
            if known[i]:
                c.add_id(i)
            else:
                c.add_const(False)
    return Transducer(c, tuple(range(n)), tuple(range(n, 2 * n)))


def _check_len(n: int, known: tuple) -> int:
    if n < 1:
        raise BuildError("arity must be at least 1")
    if len(known) != n:
        raise BuildError(f"known sequence has length {len(known)}, expected {n}")
    return n


def build_unbounded(n: int, op: str, known_side: str, known) -> Transducer:
    """Unbounded binary operator with one operand known, as an evaluated
    chain circuit.

    Future operators (U, R) chain output i to output i+1 with the far end at
    n-1; past operators (S, T) chain to i-1 with the far end at 0. The raw
    chain rules come from the one-step expansion of each operator with the
    known side substituted; the result is evaluated before returning, which
    folds the boundary constant into the chain.

    Layout: variables 0..n-1, outputs n..2n-1.
    """
    if op not in BINARY_OPS:
        raise BuildError(f"unknown binary operator {op!r}")
    if known_side not in ("left", "right"):
        raise BuildError(f"known_side must be 'left' or 'right', got {known_side!r}")
    known = tuple(bool(b) for b in known)
    n = _check_len(n, known)
    c = Circuit()
    for _ in range(n):
        c.add_var()
    future = op in FUTURE_OPS
    edge = n - 1 if future else 0
    right_known = known_side == "right"
    for i in range(n):
        neighbour = n + (i + 1 if future else i - 1)
        if i == edge:
            # the chain's far end: no neighbour to recurse into
            if right_known:
                c.add_const(known[i])
            else:
                c.add_id(i)
        elif op in ("U", "S"):
            if right_known:
                if known[i]:
                    c.add_const(True)
                else:
                    c.add_and(i, neighbour)
            else:
                if known[i]:
                    c.add_or(i, neighbour)
                else:
                    c.add_id(i)
        else:  # R, T
            if right_known:
                if known[i]:
                    c.add_or(i, neighbour)
                else:
                    c.add_const(False)
            else:
                if known[i]:
                    c.add_id(i)
                else:
                    c.add_and(i, neighbour)
    t = Transducer(c, tuple(range(n)), tuple(range(n, 2 * n)))
    return cir.evaluate_transducer(t)


def build_bounded(n: int, op: str, bound: int, known_side: str, known) -> Transducer:
    """Bounded binary operator with one operand known.

    With the right operand known the window can be decided per position, so
    the result is a single collapsed row: output i is a constant wherever the
    known sequence settles the window, else a chain gate into output i+1
    (future) or i-1 (past). That row is returned raw, without evaluation;
    chain gates keep their pointers at constant neighbours.

    With the left operand known, the bound becomes an unrolled grid of
    bound+1 rows. Row `bound` is the variable row; each row applies one step
    of the operator's expansion reading the row below, and row 0 is the
    output. Gate (i, j) sits at id (bound - j) * n + i. The grid is evaluated
    before returning (there are no constants in it, so only Id chains
    compress). With bound = 0 the operator degenerates to its right operand
    and the grid is just the variable row (inputs == outputs).
    """
    if op not in BINARY_OPS:
        raise BuildError(f"unknown binary operator {op!r}")
    if known_side not in ("left", "right"):
        raise BuildError(f"known_side must be 'left' or 'right', got {known_side!r}")
    if bound < 0:
        raise BuildError("bound must be non-negative")
    known = tuple(bool(b) for b in known)
    n = _check_len(n, known)
    future = op in FUTURE_OPS
    if known_side == "right":
        return _bounded_collapsed(n, op, bound, known, future)
    return _bounded_grid(n, op, bound, known, future)


def _window(i: int, n: int, bound: int, future: bool) -> range:
    if future:
        return range(i, min(i + bound, n - 1) + 1)
    return range(max(i - bound, 0), i + 1)


def _bounded_collapsed(n, op, bound, known, future) -> Transducer:
    c = Circuit()
    for _ in range(n):
        c.add_var()
    exists = op in ("U", "S")
    for i in range(n):
        window = _window(i, n, bound, future)
        neighbour = n + (i + 1 if future else i - 1)
        last = window[-1] if future else window[0]
        if exists:
            if known[i]:
                c.add_const(True)
            elif not any(known[j] for j in window):
                c.add_const(False)
            elif i == last:
                # window is {i} with known[i] False, already handled above;
                # unreachable, kept as a guard
                c.add_const(False)
            else:
                c.add_and(i, neighbour)
        else:
            if not known[i]:
                c.add_const(False)
            elif all(known[j] for j in window):
                c.add_const(True)
            elif i == last:
                c.add_const(True)
            else:
                c.add_or(i, neighbour)
    return Transducer(c, tuple(range(n)), tuple(range(n, 2 * n)))


def _bounded_grid(n, op, bound, known, future) -> Transducer:
    c = Circuit()
    for _ in range(n):
        c.add_var()
    exists = op in ("U", "S")

    def gate_at(i: int, j: int) -> int:
        return (bound - j) * n + i

    for j in range(bound - 1, -1, -1):
        for i in range(n):
            below = gate_at(i, j + 1)
            diag_i = i + 1 if future else i - 1
            if not 0 <= diag_i < n:
                c.add_id(below)
            elif known[i]:
                diag = gate_at(diag_i, j + 1)
                if exists:
                    c.add_or(below, diag)
                else:
                    c.add_id(below)
            else:
                if exists:
                    c.add_id(below)
                else:
                    diag = gate_at(diag_i, j + 1)
                    c.add_and(below, diag)
    inputs = tuple(range(n))
    outputs = tuple(range(bound * n, bound * n + n))
    t = Transducer(c, inputs, outputs)
    return cir.evaluate_transducer(t)
