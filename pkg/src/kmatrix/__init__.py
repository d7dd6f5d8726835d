"""Streaming graph summarization sketches and benchmark harness."""

from kmatrix.kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
