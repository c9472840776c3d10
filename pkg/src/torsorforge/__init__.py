"""Classification of group coverings, torsors and twisted local systems over
finite combinatorial bases, by exhaustive enumeration of crossed morphisms and
nonabelian Cech cocycles with finite coefficient groups."""

from .errors import CapacityError, InvariantError, OracleMismatch, TorsorForgeError

__version__ = "0.1.0"

__all__ = ["CapacityError", "InvariantError", "OracleMismatch", "TorsorForgeError", "__version__"]
