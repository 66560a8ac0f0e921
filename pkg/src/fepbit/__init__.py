"""Ferroelectric-FET probabilistic bits: stochastic phase-field dynamics,
FeFET transport, p-curve extraction and invertible-logic networks."""

__version__ = "0.1.0"
