"""Renyi-Ulam query strategies and online algorithms with imperfect advice."""

__version__ = "0.1.0"
