"""Exception types shared across the library, CLI and service."""


class DragwarpError(Exception):
    """Base class for all library errors."""


class InvalidInputError(DragwarpError, ValueError):
    """Caller supplied data that violates a documented precondition."""


class BackendNotFoundError(DragwarpError, KeyError):
    """Requested inpainting backend is not registered."""

    def __init__(self, name, available):
        self.name = name
        self.available = sorted(available)
        super().__init__(f"unknown backend {name!r}; available: {', '.join(self.available)}")

    def __str__(self):
        return self.args[0]


class BackendUnavailableError(DragwarpError, RuntimeError):
    """A remote backend could not be reached or timed out."""


class ProtocolError(DragwarpError, RuntimeError):
    """A remote peer answered with a malformed or contract-violating payload."""


class SegmenterError(DragwarpError, RuntimeError):
    """The external segmentation service failed; refinement degrades to passthrough."""
