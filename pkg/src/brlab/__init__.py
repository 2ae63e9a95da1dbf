"""Bounded remainder sets for the continuous irrational rotation on the torus.

Modules: ``contfrac`` (continued fractions, Ostrowski numeration),
``geometry`` (target sets and their profiles), ``brf`` (Birkhoff sums of
hat and dome functions), ``flow`` (occupancy of the linear flow) and
``experiments`` (seeded recipes).  ``brlab`` on the command line wraps them.
"""
from .contfrac import (ContinuedFraction, OstrowskiExpansion, expand_value, from_quotients,
                       ostrowski_expand, ostrowski_value)
from .errors import (BrlabError, ConstructionError, DecompositionError, InternalConsistencyError,
                     InvalidInputError, PrecisionError, ResourceError, UnsupportedModeError)
from .quadratic import QuadraticNumber

__version__ = "0.1.0"

__all__ = [
    "BrlabError", "ConstructionError", "ContinuedFraction", "DecompositionError",
    "InternalConsistencyError", "InvalidInputError", "OstrowskiExpansion", "PrecisionError",
    "QuadraticNumber", "ResourceError", "UnsupportedModeError", "expand_value", "from_quotients",
    "ostrowski_expand", "ostrowski_value",
]
