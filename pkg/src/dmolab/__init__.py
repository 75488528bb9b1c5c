"""dmolab: Dirac oscillators, isospin extensions, and tight-binding emulations."""

__version__ = "0.1.0"
