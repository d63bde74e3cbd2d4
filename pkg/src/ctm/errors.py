"""Exception hierarchy shared across the package."""


class CtmError(Exception):
    """Base class for all errors raised by this package."""


class MalformedMachineError(CtmError, ValueError):
    """A transition table violates the machine invariants."""


class IndexRangeError(CtmError, ValueError):
    """An enumeration index or index range is out of bounds."""


class CheckpointError(CtmError, ValueError):
    """A checkpoint file is unreadable, corrupt, or incompatible."""


class DistributionError(CtmError, ValueError):
    """A distribution cannot be built or queried as requested."""


class StringNotProducedError(DistributionError, KeyError):
    """The queried string was never produced in the machine space."""


class InvariantError(CtmError, AssertionError):
    """Computed data violates an internal invariant (a bug, not bad input)."""
