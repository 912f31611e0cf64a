"""Joint torsion of commuting operators, local multiplicities and tame symbols."""

from torsion_lab.errors import (
    BoundaryZeroError,
    ModelError,
    NumericalError,
    StabilizationError,
    TorsionLabError,
)
from torsion_lab.linalg import RankPolicy

__all__ = [
    "BoundaryZeroError",
    "ModelError",
    "NumericalError",
    "RankPolicy",
    "StabilizationError",
    "TorsionLabError",
]

__version__ = "0.1.0"
