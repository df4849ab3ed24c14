"""Online-LOCAL graph coloring: games, algorithms, adversaries and invariant checks."""
from .errors import (AdversaryError, BudgetBreach, ColorlabError, OracleFailure,
                     PreconditionError, UnknownNodeError)
from .graph_core import DirectedWalk, LabeledGraph

__all__ = ["AdversaryError", "BudgetBreach", "ColorlabError", "DirectedWalk", "LabeledGraph",
           "OracleFailure", "PreconditionError", "UnknownNodeError"]
__version__ = "0.1.0"
