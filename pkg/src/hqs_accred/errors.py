"""Exception types shared across the package."""

from __future__ import annotations


class HqsError(Exception):
    """Base class for all package errors."""


class DimensionError(HqsError, ValueError):
    """Operands disagree on qubit count or matrix shape."""


class CapacityError(HqsError):
    """Requested register exceeds the dense-simulation cap."""


class NotTwoColourable(HqsError):
    """The interaction graph has an odd cycle.

    ``witness`` lists the vertices of one odd cycle in traversal order.
    """

    def __init__(self, witness):
        self.witness = tuple(witness)
        super().__init__(
            f"graph is not 2-colourable; odd cycle {'-'.join(map(str, self.witness))}"
        )


class ChannelError(HqsError, ValueError):
    """Kraus operators do not define a trace-preserving map."""


class ConfigError(HqsError):
    """Malformed or inconsistent configuration.

    ``kind`` is ``"parse"`` for syntax errors and ``"validation"`` for
    semantically invalid content. ``line``/``column`` are 1-based when known.
    """

    def __init__(self, message, kind="validation", line=None, column=None):
        self.kind = kind
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
