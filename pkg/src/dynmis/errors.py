"""Exception hierarchy shared by all modules."""


class DynMisError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(DynMisError, ValueError):
    """Two objects (or an object and a cube) live in different dimensions."""


class UpdateError(DynMisError, ValueError):
    """Insert of a present id, delete of an absent id, or a mismatched delete."""


class InstanceTooLarge(DynMisError, ValueError):
    """The exact oracle refuses instances beyond its size cap."""


class MixError(DynMisError):
    """Invalid MIX input, or advancing a drained schedule."""


class FeasibilityError(DynMisError, AssertionError):
    """A deamortized round ended before its MIX or DISQS catch-up finished."""
