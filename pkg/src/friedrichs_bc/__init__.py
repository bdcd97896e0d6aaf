"""Boundary conditions for abstract Friedrichs operators in finite boundary models.

Submodules
----------
krein
    Indefinite inner products on ``C^n``: complements, sign tests, maximality.
boundary
    Boundary quotient models and the (V)/(X)/(M)/contraction descriptions.
transport
    The transport operator ``d/dx + 1`` on (0, 1).
elliptic
    The first-order system for ``-u'' + u`` on (0, 1).
oracles
    Independent quadrature, finite-difference and power-iteration checks.
fuzz
    Randomised property suite over boundary models.
report, cli
    JSON/CSV/SVG reports and the ``friedrichs-bc`` command.
"""

from . import boundary, elliptic, krein, oracles, transport
from .boundary import (BCSubspace, BoundaryModel, ContractionU, MOperatorMat, check_M, check_V,
                       check_X, contraction_from_v, is_m_accretive, m_from_v, v_from_contraction,
                       v_from_m)
from .errors import (DegenerateForm, FriedrichsError, InvalidDimension, InvalidParameter,
                     InvalidW2, NotADirectSum, NotAGenerator, NotBijectiveRealisation,
                     NotInvertible, NotMBoundary, ParseError)
from .krein import IndefForm, Subspace

__version__ = "0.1.0"

__all__ = [
    "krein", "boundary", "transport", "elliptic", "oracles",
    "IndefForm", "Subspace", "BoundaryModel", "BCSubspace", "MOperatorMat", "ContractionU",
    "check_V", "check_X", "check_M", "is_m_accretive", "m_from_v", "v_from_m",
    "v_from_contraction", "contraction_from_v",
    "FriedrichsError", "InvalidDimension", "DegenerateForm", "NotADirectSum",
    "NotBijectiveRealisation", "InvalidW2", "NotMBoundary", "NotInvertible", "NotAGenerator",
    "InvalidParameter", "ParseError",
    "__version__",
]
