"""Shared test utilities: bit-parallel truth tables and random circuits."""

from __future__ import annotations

import random

from pathcheck.circuit import (
    G_AND,
    G_FALSE,
    G_ID,
    G_OR,
    G_TRUE,
    G_VAR,
    Circuit,
    Transducer,
    evaluate,
)


def truth_table(t: Transducer) -> tuple[int, ...]:
    """One bitmask per output, over all 2^k input assignments.

    Bit `a` of an output's mask is that output's value on the assignment
    whose variable i takes bit i of `a`. Two transducers with equal input
    arity compute the same function iff their tables are equal.
    """
    k = len(t.inputs)
    if k > 16:
        raise ValueError("truth tables limited to 16 inputs")
    width = 1 << k
    full = (1 << width) - 1
    c = t.circuit
    kind, arg0, arg1 = c.kind, c.arg0, c.arg1
    masks: dict[int, int] = {}
    for i, gate in enumerate(t.inputs):
        # variable i is 1 exactly on assignments with bit i set
        block = ((1 << (1 << i)) - 1) << (1 << i)  # 2^i zeros then 2^i ones
        m = 0
        step = 1 << (i + 1)
        for start in range(0, width, step):
            m |= block << start
        masks[gate] = m
    for root in t.outputs:
        if root in masks:
            continue
        stack = [root]
        while stack:
            g = stack[-1]
            if g in masks:
                stack.pop()
                continue
            knd = kind[g]
            if knd == G_FALSE:
                masks[g] = 0
                stack.pop()
            elif knd == G_TRUE:
                masks[g] = full
                stack.pop()
            elif knd == G_VAR:
                raise AssertionError(f"var gate {g} is not an input")
            elif knd == G_ID:
                d = arg0[g]
                if d in masks:
                    masks[g] = masks[d]
                    stack.pop()
                else:
                    stack.append(d)
            else:
                l, r = arg0[g], arg1[g]
                ml, mr = masks.get(l), masks.get(r)
                if ml is None:
                    stack.append(l)
                if mr is None:
                    stack.append(r)
                if ml is not None and mr is not None:
                    masks[g] = (ml & mr) if knd == G_AND else (ml | mr)
                    stack.pop()
    return tuple(masks[o] for o in t.outputs)


def random_evaluated_transducer(
    rng: random.Random,
    arity_in: int,
    arity_out: int,
    extra_gates: int = 12,
    const_bias: float = 0.2,
) -> Transducer:
    """A random DAG circuit, evaluated so constants are sinks.

    Outputs are drawn with replacement-free sampling when possible and may
    well be constants, which is exactly what compose_evaluated has to cope
    with.
    """
    c = Circuit()
    inputs = tuple(c.add_var() for _ in range(arity_in))
    pool = list(inputs)
    if not pool:
        pool.append(c.add_const(rng.random() < 0.5))
    while len(pool) - arity_in < extra_gates or len(pool) < arity_out:
        r = rng.random()
        if r < const_bias:
            g = c.add_const(rng.random() < 0.5)
        elif r < const_bias + 0.15:
            g = c.add_id(rng.choice(pool))
        elif r < const_bias + 0.575:
            g = c.add_and(rng.choice(pool), rng.choice(pool))
        else:
            g = c.add_or(rng.choice(pool), rng.choice(pool))
        pool.append(g)
    outputs = tuple(rng.sample(pool, arity_out))
    return Transducer(evaluate(c), inputs, outputs)


def random_bits(rng: random.Random, n: int) -> tuple[bool, ...]:
    return tuple(rng.random() < 0.5 for _ in range(n))
