"""Monte Carlo simulator for noisy Clifford+T fault-tolerant circuits."""

from .pauli import PauliString, PauliError
from .tableau import Tableau, IndexShift, TableauError
from .state import (
    GenStabState,
    CosetAnalysis,
    CapacityError,
    CorruptStateError,
    init_zero,
)

__version__ = "0.1.0"

__all__ = [
    "PauliString",
    "PauliError",
    "Tableau",
    "IndexShift",
    "TableauError",
    "GenStabState",
    "CosetAnalysis",
    "CapacityError",
    "CorruptStateError",
    "init_zero",
    "__version__",
]
