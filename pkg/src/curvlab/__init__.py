"""Curvature laboratory for non-reductive homogeneous four-manifolds."""
from ._backend import BACKEND

__version__ = "0.1.0"
