"""Finite-size toolkit for End-of-Line instances, Brouwer embeddings and the bimatrix reduction."""

__version__ = "0.1.0"
