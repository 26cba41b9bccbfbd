"""Finite-trace checking for temporal formulas with past and bounded
operators, via trace-specialized monotone circuits and tree contraction."""

from .errors import (
    BuildError,
    CircuitError,
    ContractionError,
    FormulaError,
    ParseError,
    PathcheckError,
    TraceError,
    UnknownProposition,
)
from .formula import (
    Atom,
    And,
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
    is_pnf,
    parse,
    prune_bounds,
    size,
    subformula_occurrences,
    to_pnf,
)
from .trace import Trace, atom_sequence, load_trace, make_trace, to_csv
from .semantics import eval_seq, holds_at
from .circuit import (
    Circuit,
    Transducer,
    apply,
    compose,
    compose_evaluated,
    constant_circuit,
    constants_are_sinks,
    evaluate,
    identity,
    to_dot,
)
from .builder import (
    build_boolean,
    build_bounded,
    build_literal,
    build_shift,
    build_unbounded,
)
from .contraction import (
    CheckResult,
    ContractionRecord,
    ContractionTree,
    check,
    contract_step,
    init_tree,
    run_contraction,
    verify_tree,
)

__version__ = "0.1.0"
