"""Verification engine for static 3-manifolds with positive scalar curvature."""

__version__ = "0.1.0"

