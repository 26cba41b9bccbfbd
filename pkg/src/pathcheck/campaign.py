"""Randomized differential campaigns: circuit engine vs the oracle.

Cases are generated from per-case integer seeds derived only from the
campaign seed and the case index, so a campaign's verdict payload is
identical no matter how cases are distributed over processes or how many
threads the engine uses. The payload encodes every case's verdict sequence
(one byte per position, 0xff between cases, 0xfe for an engine error) and is
hashed for quick comparison.
"""

from __future__ import annotations

import hashlib
import math
import multiprocessing
import random
import time
from dataclasses import dataclass, field
from typing import Optional

from .contraction import check
from .errors import PathcheckError
from .formula import (
    And,
    Atom,
    BoundedRelease,
    BoundedSince,
    BoundedTrigger,
    BoundedUntil,
    Formula,
    Next,
    Not,
    Or,
    Release,
    Since,
    Trigger,
    Until,
    WeakNext,
    WeakYesterday,
    Yesterday,
    format_formula,
    size,
)
from .semantics import eval_seq
from .trace import Trace, to_csv

ALPHABET = ("a", "b", "c", "d")

_BOUNDED = (BoundedUntil, BoundedRelease, BoundedSince, BoundedTrigger)
_PLAIN_BINARY = (And, Or, Until, Release, Since, Trigger)
_UNARY = (Next, WeakNext, Yesterday, WeakYesterday)


@dataclass(frozen=True)
class CampaignConfig:
    cases: int = 10_000
    max_size: int = 20
    max_len: int = 50
    max_bound: int = 10
    seed: int = 0
    workers: int = 1  # engine threads per case


@dataclass(frozen=True)
class CaseFailure:
    index: int
    formula: str
    trace_csv: str
    expected: tuple
    got: object  # sequence, or an error string if the engine raised


@dataclass
class CampaignResult:
    total: int
    failures: list[CaseFailure] = field(default_factory=list)
    failure_count: int = 0
    payload: bytes = b""
    digest: str = ""
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failure_count == 0


def case_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def random_formula(rng: random.Random, budget: int, max_bound: int, alphabet=ALPHABET) -> Formula:
    """A random formula with size at most `budget` (bounded operators cost
    1 + bound). Constructors are drawn uniformly, with an extra 20% slice
    going to bounded operators whenever the budget allows one."""
    if budget <= 1:
        return Atom(rng.choice(alphabet))
    if budget >= 3 and rng.random() < 0.2:
        cls = rng.choice(_BOUNDED)
        bound = rng.randint(0, min(max_bound, budget - 3))
        rest = budget - 1 - bound
        left = rng.randint(1, rest - 1)
        return cls(
            random_formula(rng, left, max_bound, alphabet),
            random_formula(rng, rest - left, max_bound, alphabet),
            bound,
        )
    pick = rng.randrange(12)
    if pick == 0:
        return Atom(rng.choice(alphabet))
    if pick == 1:
        return Not(random_formula(rng, budget - 1, max_bound, alphabet))
    if pick < 6:
        cls = _UNARY[pick - 2]
        return cls(random_formula(rng, budget - 1, max_bound, alphabet))
    cls = _PLAIN_BINARY[pick - 6]
    if budget < 3:
        return Atom(rng.choice(alphabet))
    left = rng.randint(1, budget - 2)
    return cls(
        random_formula(rng, left, max_bound, alphabet),
        random_formula(rng, budget - 1 - left, max_bound, alphabet),
    )


def random_trace(rng: random.Random, max_len: int, alphabet=ALPHABET) -> Trace:
    n = rng.randint(1, max_len)
    states = tuple(
        frozenset(p for p in alphabet if rng.random() < 0.5) for _ in range(n)
    )
    return Trace(states, tuple(alphabet))


def run_case(cfg: CampaignConfig, index: int) -> tuple[bytes, Optional[CaseFailure]]:
    rng = random.Random(case_seed(cfg.seed, index))
    f = random_formula(rng, cfg.max_size, cfg.max_bound)
    tr = random_trace(rng, cfg.max_len)
    expected = eval_seq(tr, f)
    try:
        got = check(f, tr, engine="circuit", workers=cfg.workers).sequence
    except Exception as exc:  # an engine crash is a failed case, not a crash
        failure = CaseFailure(
            index, format_formula(f), to_csv(tr), expected, f"{type(exc).__name__}: {exc}"
        )
        return b"\xfe\xff", failure
    payload = bytes(1 if b else 0 for b in got) + b"\xff"
    if got != expected:
        return payload, CaseFailure(index, format_formula(f), to_csv(tr), expected, got)
    return payload, None


def _run_range(args) -> tuple[bytes, list[CaseFailure]]:
    cfg, start, stop = args
    chunks = []
    failures = []
    for i in range(start, stop):
        payload, failure = run_case(cfg, i)
        chunks.append(payload)
        if failure is not None:
            failures.append(failure)
    return b"".join(chunks), failures


def run_campaign(
    cfg: CampaignConfig, processes: int = 1, keep_failures: int = 10
) -> CampaignResult:
    """Run the whole campaign; results are independent of `processes`."""
    t0 = time.perf_counter()
    if processes < 1:
        raise PathcheckError("processes must be at least 1")
    spans = _spans(cfg.cases, processes)
    jobs = [(cfg, start, stop) for start, stop in spans]
    if processes > 1 and cfg.cases > 1:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes) as pool:
            parts = pool.map(_run_range, jobs)
    else:
        parts = [_run_range(job) for job in jobs]
    payload = b"".join(p for p, _ in parts)
    failures = [f for _, fs in parts for f in fs]
    result = CampaignResult(
        total=cfg.cases,
        failures=failures[:keep_failures],
        failure_count=len(failures),
        payload=payload,
        digest=hashlib.sha256(payload).hexdigest(),
        elapsed=time.perf_counter() - t0,
    )
    return result


def _spans(cases: int, processes: int) -> list[tuple[int, int]]:
    # a few slices per process smooths out uneven case costs
    parts = max(1, min(cases, processes * 4))
    step = math.ceil(cases / parts)
    return [(lo, min(lo + step, cases)) for lo in range(0, cases, step)]


def _disagrees(f: Formula, tr: Trace, workers: int) -> bool:
    expected = eval_seq(tr, f)
    try:
        return check(f, tr, engine="circuit", workers=workers).sequence != expected
    except Exception:
        return True


def _children(f: Formula) -> list[Formula]:
    if isinstance(f, Atom):
        return []
    if isinstance(f, (Not,) + _UNARY):
        return [f.child]
    return [f.left, f.right]


def minimize(f: Formula, tr: Trace, workers: int = 1) -> tuple[Formula, Trace]:
    """Shrink a disagreeing (formula, trace) pair greedily: halve the trace
    while it still disagrees, then try replacing the formula with one of its
    children, repeating to a fixed point."""
    if not _disagrees(f, tr, workers):
        return f, tr
    improved = True
    while improved:
        improved = False
        n = len(tr)
        if n > 1:
            half = (n + 1) // 2
            for states in (tr.states[:half], tr.states[half:]):
                cand = Trace(states, tr.alphabet)
                if _disagrees(f, cand, workers):
                    tr = cand
                    improved = True
                    break
            if improved:
                continue
        for child in _children(f):
            if size(child) >= 1 and _disagrees(child, tr, workers):
                f = child
                improved = True
                break
    return f, tr
