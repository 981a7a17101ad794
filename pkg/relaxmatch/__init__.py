"""Graph matching by convex relaxation with spectral recovery certificates."""

__version__ = "1.0.0"
