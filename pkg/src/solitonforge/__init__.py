"""Multi-soliton construction and verification for the NLS hierarchy."""
from .fields import ExplicitFields, FieldPair, SampleGrid, vacuum
from .soliton_engine import SolitonSpec, nsoliton, nsoliton_field

__version__ = "0.1.0"

__all__ = [
    "ExplicitFields",
    "FieldPair",
    "SampleGrid",
    "SolitonSpec",
    "nsoliton",
    "nsoliton_field",
    "vacuum",
    "__version__",
]
