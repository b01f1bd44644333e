"""Coded predilators, their finite comparison calculus, and executable order embeddings."""

__version__ = "0.1.0"
