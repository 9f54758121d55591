"""Singular curves with rational normalisation: local rings, generalised
divisors, duality checks and Baker-Akhiezer functions."""

__version__ = "0.1.0"
