"""MSO/FO syntax, semantics and exact equivalence oracles."""

from .formula import (
    And, ArityMismatch, Bottom, Edge, Eq, Exists1, Exists2, Forall1, Forall2, Formula,
    FormulaSyntaxError, Implies, In, Label, Not, Or, Root, Top, VocabularyError,
    affine_relabel, conj, disj, free_vars, parse, rank, relativize, shift_labels, to_sexpr,
)
from .games import ef_game
from .monadic import counts_fo_equiv, monadic_fo_equiv
from .semantics import UnboundVariable, model_check
from .structure import Structure, as_structure
from .types import (
    Budget, BudgetExceeded, HintikkaType, TypeArena, default_budget, fo_equiv, fo_type,
    mso_equiv, mso_type,
)

__all__ = [
    "And", "ArityMismatch", "Bottom", "Edge", "Eq", "Exists1", "Exists2", "Forall1", "Forall2",
    "Formula", "FormulaSyntaxError", "Implies", "In", "Label", "Not", "Or", "Root", "Top",
    "VocabularyError", "affine_relabel", "conj", "disj", "free_vars", "parse", "rank",
    "relativize", "shift_labels", "to_sexpr", "ef_game", "counts_fo_equiv", "monadic_fo_equiv",
    "UnboundVariable", "model_check", "Structure", "as_structure", "Budget", "BudgetExceeded",
    "HintikkaType", "TypeArena", "default_budget", "fo_equiv", "fo_type", "mso_equiv", "mso_type",
]
