"""Deciding first-order definability in finite structures, with certificates.

The package answers one question about a finite structure ``<A, Sigma + {R}>``:
is R first-order definable from Sigma? It answers with a defining formula
or an automorphism that separates R, and it also builds the corresponding
objects on truncated sequence spaces (counterexample maps, one-step
extensions, Boolean-valued truth values).
"""
from .definability import (
    BY_RANK,
    ORBIT_ATOMS,
    DefinableEnumeration,
    DefiningFormula,
    SigmaPattern,
    Violation,
    check_certificate,
    enumerate_definables,
    is_definable,
    synthesize,
    witness_pair,
)
from .errors import (
    ArityError,
    Definable,
    FindefError,
    FormulaSyntaxError,
    LimitExceeded,
    MapFormatError,
    NotDefinable,
    StructureError,
    UnboundVariableError,
    UnknownSymbolError,
)
from .fixtures import load_fixture
from .formula import (
    evaluate,
    parse_formula,
    quantifier_rank,
    relation_table,
    render_formula,
    simplify,
)
from .seqspace import (
    ExceptionReport,
    ExtensionTrace,
    IndexSet,
    SequenceMap,
    almost_equal,
    boolean_valuation,
    build_counterexample_map,
    check_almost_preserves,
    const,
    extend_map,
    lift,
)
from .structure import Signature, Structure, eval_relation, parse_structure, render_structure
from .symmetry import (
    Partition,
    automorphisms,
    hintikka_formula,
    orbits,
    preserves_check,
    type_partition,
)

__version__ = "0.1.0"
