"""Exact verification of Cartan-algebroid identities over polynomial charts."""

__version__ = "0.1.0"

from .kernel import Polynomial, Rational, StructuralError, ZeroTest  # noqa: E402
from .lie import KleinPair, LieAlgebra, MutationForm, Subspace  # noqa: E402
from .algebroid import AlgebroidChart, action_algebroid, chart_validate  # noqa: E402
from .connections import AConnection, HypothesisError, PreconditionError  # noqa: E402
from .cartan import FiberBracket, Geometry, LinearConnection, identity_suite  # noqa: E402
from .document import parse, serialize  # noqa: E402

__all__ = [
    "AConnection",
    "AlgebroidChart",
    "FiberBracket",
    "Geometry",
    "HypothesisError",
    "KleinPair",
    "LieAlgebra",
    "LinearConnection",
    "MutationForm",
    "Polynomial",
    "PreconditionError",
    "Rational",
    "StructuralError",
    "Subspace",
    "ZeroTest",
    "action_algebroid",
    "chart_validate",
    "identity_suite",
    "parse",
    "serialize",
]
