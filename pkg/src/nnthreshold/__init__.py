"""Gate-count and threshold analysis for concatenated Steane coding on nearest-neighbour arrays."""

__version__ = "0.1.0"
