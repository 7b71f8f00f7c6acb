"""Exception hierarchy shared by every module of the package."""


class BispanError(Exception):
    """Base class for all errors raised by :mod:`bispans`."""


class DomainMismatch(BispanError, ValueError):
    pass


class NotPullback(BispanError, ValueError):
    pass


class BoundaryMismatch(BispanError, ValueError):
    pass


class ResourceLimit(BispanError, RuntimeError):
    pass


class IndexMismatch(BispanError, ValueError):
    pass


class SemiringOverflow(BispanError, OverflowError):
    pass


class InvalidMorphism(BispanError, ValueError):
    pass


class ShapeMismatch(BispanError, ValueError):
    pass


class NotInW(BispanError, ValueError):
    pass


class SchemaViolation(BispanError, ValueError):
    """Malformed JSON document; ``path`` is a JSON pointer to the offending node."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{message} at {path or '/'}")
        self.message = message
        self.path = path
