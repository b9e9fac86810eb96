"""Exact computations with commutative differential graded algebras over Q.

Sectional-category invariants (LS category, topological complexity, Toomer
and homology-injectivity bounds) of rational spaces given by Sullivan-type
models, together with the supporting linear algebra and a model file format.
"""
from .cdga import CDGAMorphism, FreeCDGA
from .freealg import Element, GeneratorSet
from .invariants import BoundReport, lscat_bounds, tc_bounds, toomer
from .modelio import corpus, parse, serialize

__version__ = "0.1.0"

__all__ = [
    "BoundReport", "CDGAMorphism", "Element", "FreeCDGA", "GeneratorSet",
    "corpus", "lscat_bounds", "parse", "serialize", "tc_bounds", "toomer",
]
