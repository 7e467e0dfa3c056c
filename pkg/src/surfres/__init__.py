"""Chart-level resolution of singularities for ideals on a nonsingular 3-fold, in any characteristic."""

__version__ = "0.1.0"
