"""Calculation and refinement checking of reactive design contracts over
finite universes."""

from .contracts import Contract, refines
from .model import Rel, Universe, truncation

__all__ = ["Contract", "Rel", "Universe", "refines", "truncation"]
