"""Symbolic recurrence-relation engine."""

from .engine import (
    NormalizationState,
    TargetNotSolvable,
    derive_commutators,
    derive_invariant_derivatives,
    format_poly,
    free_symbols,
    recurrence,
    run_schedule,
    solve_phantom,
    structure_equations,
)
from .identities import check_identities, identity_table, report
from .jets import prolong, prolong_closed, reduce_field_jet, total_derivative

__all__ = [
    "NormalizationState",
    "TargetNotSolvable",
    "check_identities",
    "derive_commutators",
    "derive_invariant_derivatives",
    "format_poly",
    "free_symbols",
    "identity_table",
    "prolong",
    "prolong_closed",
    "recurrence",
    "reduce_field_jet",
    "report",
    "run_schedule",
    "solve_phantom",
    "structure_equations",
    "total_derivative",
]
