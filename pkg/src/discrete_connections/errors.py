"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """A point, pair or tuple lies outside the set an operation is defined on."""


class BranchCutError(DomainError):
    """The principal logarithm was requested on its branch cut."""


class NotSmallError(DomainError):
    """A simplex is not small for the region attached to a cochain."""

    def __init__(self, simplex, region_name=None):
        self.simplex = simplex
        self.region_name = region_name
        where = f" for region {region_name!r}" if region_name else ""
        super().__init__(f"simplex {simplex} is not small{where}")


class DescriptorMismatchError(ValueError):
    """Two group values live in different groups."""


class FiberMismatchError(ValueError):
    """Two bundle points were expected to lie on the same fiber."""


class NotALoopError(ValueError):
    """A discrete path does not end where it starts."""


class ConnectionValidationError(ValueError):
    """A user-supplied connection or lift violates a defining property."""
