"""Shared exception root for the package.

Every module defines its own error classes next to the code that raises
them; they all derive from ConstructError so the CLI can catch pipeline
failures in one place.
"""


class ConstructError(Exception):
    """Base class for all errors raised by this package."""
