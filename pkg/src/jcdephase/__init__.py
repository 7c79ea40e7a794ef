"""Coherence dynamics of a qubit dispersively coupled to N thermal modes."""

__version__ = "0.1.0"
