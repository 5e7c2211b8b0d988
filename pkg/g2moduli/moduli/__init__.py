"""Moduli classifier: outcome of each family member, decay fits and boundary search."""

from .boundary import BoundaryLocator, BoundaryResult, locate_boundary
from .classifier import ClassificationRecord, ModuliClassifier, Outcome, classify
from .decay_fit import DecayFit, fit_decay
from .index_table import index_lookup
from .scanner import ParameterScanner

__all__ = [
    "BoundaryLocator",
    "BoundaryResult",
    "locate_boundary",
    "ClassificationRecord",
    "ModuliClassifier",
    "Outcome",
    "classify",
    "DecayFit",
    "fit_decay",
    "index_lookup",
    "ParameterScanner",
]
