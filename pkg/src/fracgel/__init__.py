"""fracgel: numerics for stable solutions of the fractional Gel'fand equation.

Sampled scalar fields on R^n, the principal-value fractional Laplacian,
the weighted half-space extension, scale-normalized energies, stability
quadratic forms and an epsilon-regularity singular-set detector.
"""

from .core import ConstantSet, Params, constants
from .field import Field, TailModel, load_field

__version__ = "0.1.0"

__all__ = [
    "Params",
    "ConstantSet",
    "constants",
    "Field",
    "TailModel",
    "load_field",
    "__version__",
]
