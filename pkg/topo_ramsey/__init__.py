"""Certified convergent subsequences for functions on finite sets of naturals.

Colorings and tuple functions on the r-element subsets of a lazily produced
stream of naturals are thinned, level by level, to substreams on which they
converge in a compact metric space. Every result comes with a certificate that
verify_certificate re-checks by exhaustive enumeration with exact arithmetic.
"""

from .convergence import (
    ConvergenceCertificate,
    LocatedLimit,
    TupleFunction,
    derive_lower_certificate,
    extract_convergent,
    lift_coloring,
    verify_certificate,
)
from .dyadic import Dyadic
from .engines import NiceSystem, extract_nice, extract_product, inductive_extract, verify_nice
from .ramsey import Coloring, find_homogeneous_exact, infinite_ramsey_extract
from .streams import Fuel, NatStream, pseudo_intersection

__all__ = [
    "Coloring",
    "ConvergenceCertificate",
    "Dyadic",
    "Fuel",
    "LocatedLimit",
    "NatStream",
    "NiceSystem",
    "TupleFunction",
    "derive_lower_certificate",
    "extract_convergent",
    "extract_nice",
    "extract_product",
    "find_homogeneous_exact",
    "inductive_extract",
    "infinite_ramsey_extract",
    "lift_coloring",
    "pseudo_intersection",
    "verify_certificate",
    "verify_nice",
]
