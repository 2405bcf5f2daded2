"""Reconstruction of interpretable controller models from decompiled binaries.

Pipeline: load an FMU-like container (variable descriptions, decompiled C
sources, traces), parse the C into a code AST, normalize decompiler
distortions, translate to a symbolic equation model, then search for the
symbol-to-variable mapping whose simulated output best matches the
reference trace.
"""

from construct.errors import ConstructError

__all__ = ["ConstructError"]

__version__ = "0.1.0"
