"""Refinement laws: the catalogue, law application, obligations and the meta-verifier."""

from .catalogue import BUILTIN_LAWS, Law, Premise, catalogue, lookup, param_kinds
from .matching import Application, apply_law, context_at, instantiate, match
from .obligations import Discharge, Entails, Equiv, SemanticRefines, WellFounded, conj, discharge, discharge_detail

__all__ = [
    "BUILTIN_LAWS", "Law", "Premise", "catalogue", "lookup", "param_kinds", "Application", "apply_law",
    "context_at", "instantiate", "match", "Discharge", "Entails", "Equiv", "SemanticRefines", "WellFounded",
    "conj", "discharge", "discharge_detail",
]
