"""Exception types shared across the package.

The CLI maps these onto its exit codes: ``ModelError`` -> 2,
``UnsupportedSizeError`` -> 3, ``InvariantError`` -> 4.
"""


class ModelError(ValueError):
    """A channel model or pmf failed validation."""


class UnsupportedSizeError(ValueError):
    """An alphabet or dimension is outside what the numerics support."""


class InvariantError(RuntimeError):
    """An internal consistency check failed (a bug signal, not user error)."""
