"""Monotone Boolean circuits and transducers over a shared gate arena.

A circuit is three parallel lists (kind, first arg, second arg) indexed by
gate id. Ids are dense in construction order and never reused or dropped;
evaluation rewrites labels in place of a copy but keeps the arena size, so a
gate id stays meaningful across evaluate/compose.

A transducer wraps a circuit with an ordered input interface (exactly its
Var gates, each once) and an ordered output interface (any gates). Feeding
one transducer's outputs into another's inputs composes their functions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CircuitError

G_FALSE = 0
G_TRUE = 1
G_VAR = 2
G_ID = 3
G_AND = 4
G_OR = 5

KIND_NAMES = {
    G_FALSE: "0",
    G_TRUE: "1",
    G_VAR: "VAR",
    G_ID: "ID",
    G_AND: "AND",
    G_OR: "OR",
}


class Circuit:
    __slots__ = ("kind", "arg0", "arg1")

    def __init__(self, kind=None, arg0=None, arg1=None):
        self.kind: list[int] = kind if kind is not None else []
        self.arg0: list[int] = arg0 if arg0 is not None else []
        self.arg1: list[int] = arg1 if arg1 is not None else []

    def __len__(self) -> int:
        return len(self.kind)

    def add(self, kind: int, a: int = -1, b: int = -1) -> int:
        gid = len(self.kind)
        self.kind.append(kind)
        self.arg0.append(a)
        self.arg1.append(b)
        return gid

    def add_const(self, value: bool) -> int:
        return self.add(G_TRUE if value else G_FALSE)

    def add_var(self) -> int:
        return self.add(G_VAR)

    def add_id(self, target: int) -> int:
        return self.add(G_ID, target)

    def add_and(self, a: int, b: int) -> int:
        return self.add(G_AND, a, b)

    def add_or(self, a: int, b: int) -> int:
        return self.add(G_OR, a, b)

    def copy(self) -> "Circuit":
        return Circuit(self.kind[:], self.arg0[:], self.arg1[:])

    def is_const(self, g: int) -> bool:
        return self.kind[g] <= G_TRUE

    def dependencies(self, g: int) -> tuple[int, ...]:
        k = self.kind[g]
        if k == G_ID:
            return (self.arg0[g],)
        if k >= G_AND:
            return (self.arg0[g], self.arg1[g])
        return ()

    def gate(self, g: int) -> tuple:
        """Readable label, for tests and debugging."""
        k = self.kind[g]
        if k == G_FALSE:
            return ("const", False)
        if k == G_TRUE:
            return ("const", True)
        if k == G_VAR:
            return ("var",)
        if k == G_ID:
            return ("id", self.arg0[g])
        name = "and" if k == G_AND else "or"
        return (name, self.arg0[g], self.arg1[g])


@dataclass(frozen=True)
class Transducer:
    circuit: Circuit
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    @property
    def arity_in(self) -> int:
        return len(self.inputs)

    @property
    def arity_out(self) -> int:
        return len(self.outputs)


def constant_circuit(bits) -> Transducer:
    """Arity 0 -> len(bits): output gate i is the constant bits[i]."""
    c = Circuit()
    for b in bits:
        c.add_const(bool(b))
    return Transducer(c, (), tuple(range(len(c))))


def identity(n: int) -> Transducer:
    """n Var gates wired straight through (inputs == outputs)."""
    if n < 0:
        raise CircuitError("identity arity must be non-negative")
    c = Circuit()
    ids = tuple(c.add_var() for _ in range(n))
    return Transducer(c, ids, ids)


def validate(t: Transducer) -> None:
    """Check the transducer invariants; raises CircuitError on violation."""
    c = t.circuit
    m = len(c)
    var_gates = [g for g in range(m) if c.kind[g] == G_VAR]
    if sorted(t.inputs) != var_gates:
        raise CircuitError("inputs must list exactly the Var gates, each once")
    if len(set(t.inputs)) != len(t.inputs):
        raise CircuitError("duplicate input gate")
    for g in t.outputs:
        if not 0 <= g < m:
            raise CircuitError(f"output gate {g} out of range")
    for g in range(m):
        for d in c.dependencies(g):
            if not 0 <= d < m:
                raise CircuitError(f"gate {g} references missing gate {d}")
    _check_acyclic(c)


def _check_acyclic(c: Circuit) -> None:
    m = len(c)
    state = bytearray(m)  # 0 unvisited, 1 on stack, 2 done
    for root in range(m):
        if state[root]:
            continue
        stack = [root]
        while stack:
            g = stack[-1]
            if state[g] == 2:
                stack.pop()
                continue
            if state[g] == 0:
                state[g] = 1
                advanced = False
                for d in c.dependencies(g):
                    if state[d] == 1:
                        raise CircuitError(f"cycle through gate {d}")
                    if state[d] == 0:
                        stack.append(d)
                        advanced = True
                if advanced:
                    continue
            state[g] = 2
            stack.pop()


def constants_are_sinks(c: Circuit) -> bool:
    """The evaluatedness test: no gate reads a constant gate."""
    kind = c.kind
    for g in range(len(c)):
        for d in c.dependencies(g):
            if kind[d] <= G_TRUE:
                return False
    return True


def evaluate(c: Circuit) -> Circuit:
    """Fixed point of the local simplification rules, as a new circuit.

    Constants fold through Id/And/Or; an And/Or with one side decided becomes
    a constant or an Id of the live side; Id chains compress to their final
    non-Id target. Gate count is preserved and surviving And/Or gates keep
    their original operand pointers, so only labels change. In the result
    every constant gate is a sink. Raises CircuitError on a cycle.
    """
    kind = c.kind
    arg0 = c.arg0
    arg1 = c.arg1
    m = len(kind)
    nk = kind[:]
    na = arg0[:]
    nb = arg1[:]
    val = [-1] * m  # 0/1 once a gate is known constant
    tgt = list(range(m))  # Id-chain compression target
    state = bytearray(m)  # 0 unvisited, 1 in progress, 2 done

    for root in range(m):
        if state[root]:
            continue
        stack = [root]
        while stack:
            g = stack[-1]
            if state[g] == 2:
                stack.pop()
                continue
            k = kind[g]
            if k <= G_TRUE:
                val[g] = k
                state[g] = 2
                stack.pop()
                continue
            if k == G_VAR:
                state[g] = 2
                stack.pop()
                continue
            if state[g] == 0:
                state[g] = 1
                pending = False
                if k == G_ID:
                    d = arg0[g]
                    if state[d] != 2:
                        if state[d] == 1:
                            raise CircuitError(f"cycle through gate {d}")
                        stack.append(d)
                        pending = True
                else:
                    for d in (arg0[g], arg1[g]):
                        if state[d] != 2:
                            if state[d] == 1:
                                raise CircuitError(f"cycle through gate {d}")
                            stack.append(d)
                            pending = True
                if pending:
                    continue
            if k == G_ID:
                d = arg0[g]
                v = val[d]
                if v >= 0:
                    nk[g] = v
                    na[g] = -1
                    val[g] = v
                else:
                    t = tgt[d]
                    na[g] = t
                    tgt[g] = t
            elif k == G_AND:
                l, r = arg0[g], arg1[g]
                vl, vr = val[l], val[r]
                if vl == 0 or vr == 0:
                    nk[g] = G_FALSE
                    na[g] = -1
                    nb[g] = -1
                    val[g] = 0
                elif vl == 1 and vr == 1:
                    nk[g] = G_TRUE
                    na[g] = -1
                    nb[g] = -1
                    val[g] = 1
                elif vr == 1:
                    nk[g] = G_ID
                    na[g] = tgt[l]
                    nb[g] = -1
                    tgt[g] = tgt[l]
                elif vl == 1:
                    nk[g] = G_ID
                    na[g] = tgt[r]
                    nb[g] = -1
                    tgt[g] = tgt[r]
            else:  # G_OR
                l, r = arg0[g], arg1[g]
                vl, vr = val[l], val[r]
                if vl == 1 or vr == 1:
                    nk[g] = G_TRUE
                    na[g] = -1
                    nb[g] = -1
                    val[g] = 1
                elif vl == 0 and vr == 0:
                    nk[g] = G_FALSE
                    na[g] = -1
                    nb[g] = -1
                    val[g] = 0
                elif vr == 0:
                    nk[g] = G_ID
                    na[g] = tgt[l]
                    nb[g] = -1
                    tgt[g] = tgt[l]
                elif vl == 0:
                    nk[g] = G_ID
                    na[g] = tgt[r]
                    nb[g] = -1
                    tgt[g] = tgt[r]
            state[g] = 2
            stack.pop()
    return Circuit(nk, na, nb)


def evaluate_transducer(t: Transducer) -> Transducer:
    return Transducer(evaluate(t.circuit), t.inputs, t.outputs)


def compose(first: Transducer, second: Transducer) -> Transducer:
    """Disjoint union feeding first's outputs into second's inputs.

    The result computes second's function after first's; its inputs are
    first's and its outputs are second's (shifted into the merged arena).
    """
    if len(first.outputs) != len(second.inputs):
        raise CircuitError(
            f"arity mismatch: {len(first.outputs)} outputs fed into "
            f"{len(second.inputs)} inputs"
        )
    off = len(first.circuit)
    c = first.circuit.copy()
    c.kind.extend(second.circuit.kind)
    c.arg0.extend(a + off if a >= 0 else -1 for a in second.circuit.arg0)
    c.arg1.extend(a + off if a >= 0 else -1 for a in second.circuit.arg1)
    for pos, gate in enumerate(second.inputs):
        gid = gate + off
        c.kind[gid] = G_ID
        c.arg0[gid] = first.outputs[pos]
        c.arg1[gid] = -1
    return Transducer(c, first.inputs, tuple(o + off for o in second.outputs))


def compose_evaluated(first: Transducer, second: Transducer) -> Transducer:
    """Compose two (essentially) evaluated transducers into an evaluated one.

    Constant outputs of `first` are moved into `second` as constant labels on
    the corresponding input gates, `second` is re-evaluated if anything
    moved, then the join of the rest is evaluated. This keeps constants from
    crossing the composition boundary unevaluated.
    """
    if len(first.outputs) != len(second.inputs):
        raise CircuitError(
            f"arity mismatch: {len(first.outputs)} outputs fed into "
            f"{len(second.inputs)} inputs"
        )
    fkind = first.circuit.kind
    const_pos = [i for i, o in enumerate(first.outputs) if fkind[o] <= G_TRUE]
    if const_pos:
        moved = set(const_pos)
        c2 = second.circuit.copy()
        for i in const_pos:
            gid = second.inputs[i]
            c2.kind[gid] = fkind[first.outputs[i]]
            c2.arg0[gid] = -1
            c2.arg1[gid] = -1
        live_in = tuple(g for i, g in enumerate(second.inputs) if i not in moved)
        live_out = tuple(o for i, o in enumerate(first.outputs) if i not in moved)
        first = Transducer(first.circuit, first.inputs, live_out)
        second = Transducer(evaluate(c2), live_in, second.outputs)
    joined = compose(first, second)
    return Transducer(evaluate(joined.circuit), joined.inputs, joined.outputs)


def apply(t: Transducer, bits) -> tuple[bool, ...]:
    """Output bits of the transducer on a full input assignment."""
    bits = tuple(bits)
    if len(bits) != len(t.inputs):
        raise CircuitError(
            f"arity mismatch: {len(bits)} bits for {len(t.inputs)} inputs"
        )
    kind = t.circuit.kind
    arg0 = t.circuit.arg0
    arg1 = t.circuit.arg1
    m = len(kind)
    val = [-1] * m
    for gate, bit in zip(t.inputs, bits):
        val[gate] = 1 if bit else 0
    guard = 4 * m + 4  # any cycle grows the stack without bound; legal DAGs stay linear
    for root in t.outputs:
        if val[root] >= 0:
            continue
        stack = [root]
        while stack:
            if len(stack) > guard:
                raise CircuitError("cycle detected while applying inputs")
            g = stack[-1]
            if val[g] >= 0:
                stack.pop()
                continue
            k = kind[g]
            if k <= G_TRUE:
                val[g] = k
                stack.pop()
            elif k == G_VAR:
                raise CircuitError(f"variable gate {g} missing from the inputs")
            elif k == G_ID:
                d = arg0[g]
                if val[d] >= 0:
                    val[g] = val[d]
                    stack.pop()
                else:
                    stack.append(d)
            else:
                l, r = arg0[g], arg1[g]
                vl, vr = val[l], val[r]
                if vl < 0:
                    stack.append(l)
                if vr < 0:
                    stack.append(r)
                if vl >= 0 and vr >= 0:
                    val[g] = (vl & vr) if k == G_AND else (vl | vr)
                    stack.pop()
    return tuple(val[o] == 1 for o in t.outputs)


def to_dot(t: Transducer, graph_name: str = "circuit") -> str:
    """DOT rendering: one node per gate labeled with its kind (constants show
    their value), one edge from each gate to every gate it reads, and the
    input/output interfaces grouped with rank=same in interface order."""
    c = t.circuit
    lines = [f"digraph {graph_name} {{"]
    if t.inputs:
        lines.append("  // inputs: " + " ".join(f"g{g}" for g in t.inputs))
    if t.outputs:
        lines.append("  // outputs: " + " ".join(f"g{g}" for g in t.outputs))
    for g in range(len(c)):
        lines.append(f'  g{g} [label="{KIND_NAMES[c.kind[g]]}"];')
    for g in range(len(c)):
        for d in c.dependencies(g):
            lines.append(f"  g{g} -> g{d};")
    if t.inputs:
        lines.append("  { rank=same; " + " ".join(f"g{g};" for g in t.inputs) + " }")
    if t.outputs:
        lines.append("  { rank=same; " + " ".join(f"g{g};" for g in t.outputs) + " }")
    lines.append("}")
    return "\n".join(lines) + "\n"
