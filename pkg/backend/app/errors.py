"""
Exception hierarchy
Every error raised on purpose by the package derives from ShapeSpaceError so
callers (CLI, HTTP service) can map them to exit codes / status codes.
"""

from typing import Optional


class ShapeSpaceError(Exception):
    """Base class for all package errors."""


# ============================================================================
# PNM codec
# ============================================================================

class PnmError(ShapeSpaceError):
    """Malformed PNM input. `offset` is the byte offset where decoding failed."""

    kind = "malformed"

    def __init__(self, message: str, offset: int, source: Optional[str] = None):
        self.message = message
        self.offset = offset
        self.source = source
        where = f"{source}: " if source else ""
        super().__init__(f"{where}{message} (byte offset {offset})")

    def with_source(self, source: str) -> "PnmError":
        return type(self)(self.message, self.offset, source)


class PnmHeaderError(PnmError):
    kind = "header"


class PnmMaxvalError(PnmError):
    kind = "maxval"


class PnmTruncatedError(PnmError):
    kind = "truncated"


class PnmValueError(PnmError):
    kind = "value"


# ============================================================================
# Images, graphs, trees
# ============================================================================

class DimensionMismatchError(ShapeSpaceError):
    pass


class GraphError(ShapeSpaceError):
    pass


class EmptyGraphError(GraphError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class MalformedGraphError(GraphError):
    pass


class TreeMismatchError(ShapeSpaceError):
    """An attribute map or shape space used with a tree it was not computed on."""


class AttributeKindError(ShapeSpaceError):
    pass


class ParameterError(ShapeSpaceError):
    pass
