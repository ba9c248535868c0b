"""Tree models of bounded-clique-width graphs, exact MSO types, and size-changing tree surgery."""

from .graphs import Graph, MonadicStructure, induced_subgraph
from .trees import Forest, Tree, canonical_form, enumerate_trees, star
from .treemodel import TreeModel, flatten, interpret_formula, materialize, validate
from .logic import mso_equiv, fo_equiv, mso_type, model_check, parse
from .els import Thresholds, els_down, els_up, graph_shrink, grow, preceq, shrink
from . import bounds

__version__ = "0.1.0"

__all__ = [
    "Graph", "MonadicStructure", "induced_subgraph",
    "Forest", "Tree", "canonical_form", "enumerate_trees", "star",
    "TreeModel", "flatten", "interpret_formula", "materialize", "validate",
    "mso_equiv", "fo_equiv", "mso_type", "model_check", "parse",
    "Thresholds", "els_down", "els_up", "graph_shrink", "grow", "preceq", "shrink",
    "bounds", "__version__",
]
