"""Bogoliubov transformations and entanglement in non-uniformly moving cavities."""

__version__ = "0.1.0"
