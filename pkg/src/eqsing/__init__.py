"""Equisingular strata of canonical quasihomogeneous singularities.

Exact computations over Q: polynomial rings with symbolic coefficients,
monomial orderings and local normal forms, Tjurina/Milnor invariants, lattice
counts of h^1, the equations of the equisingular stratum, and their behaviour
under suspension by squares.
"""

from .errors import (CertificateInconclusive, ConfigurationError, DomainError, EqsingError,
                     ParseError)
from .localsing import SingularitySpec

__all__ = ["CertificateInconclusive", "ConfigurationError", "DomainError", "EqsingError",
           "ParseError", "SingularitySpec"]
__version__ = "0.1.0"
