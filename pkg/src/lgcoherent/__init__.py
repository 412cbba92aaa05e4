"""Laguerre-Gauss coherent states: closed-form wavefunctions, field sampling,
analysis metrics and a simulated hologram/phase-retrieval pipeline."""

from .field import ComplexField, GridSpec, ScalarField
from .states import CoherentParam, Family, LGIndex, StateSpec, evaluate, evolve, state_field

__all__ = [
    "ComplexField",
    "GridSpec",
    "ScalarField",
    "CoherentParam",
    "Family",
    "LGIndex",
    "StateSpec",
    "evaluate",
    "evolve",
    "state_field",
]

__version__ = "0.1.0"
