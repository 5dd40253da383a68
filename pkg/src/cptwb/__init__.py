"""Numerical workbench for finite-dimensional quantum channels.

Dense linear-algebra kernel, CPT channel representations (Kraus/Choi),
a zoo of reference channels, output entropies, a fixed-point optimizer
for extremal output p-norms, multiplicativity scans, and rank-bounded
decompositions of states and block matrices.
"""

__version__ = "0.1.0"

from . import linalg
from . import channels
from . import zoo
from . import entropy
from . import optimize
from . import decompose

__all__ = [
    "__version__",
    "linalg",
    "channels",
    "zoo",
    "entropy",
    "optimize",
    "decompose",
]
