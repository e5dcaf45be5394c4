"""Sphere distortion lab: distortion lower bounds for maps from round spheres."""

__version__ = "0.3.0"
