"""Compositional AMR parsing with the Apply-Modify graph algebra."""

__version__ = "0.1.0"
