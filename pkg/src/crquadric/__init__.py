"""crquadric: structure-equation verification for CR 3-folds in 5-dimensional hyperquadrics."""

__version__ = "0.1.0"

from .scalars import QQi, ScalarPoly, SymbolTable, NumericAssignment, random_assignment
from .forms import Coframe, Form, StructureTable, ClosureReport, wedge, numeric_eval

__all__ = [
    "QQi",
    "ScalarPoly",
    "SymbolTable",
    "NumericAssignment",
    "random_assignment",
    "Coframe",
    "Form",
    "StructureTable",
    "ClosureReport",
    "wedge",
    "numeric_eval",
    "__version__",
]
