"""Exception types raised by the library."""


class RieszPolError(Exception):
    """Base class for all library errors."""


class InvalidSetError(RieszPolError, ValueError):
    """A set descriptor is malformed or degenerate."""


class InvalidArgumentError(RieszPolError, ValueError):
    pass


class ResourceLimitError(RieszPolError):
    """A mesh or lattice sum would exceed its configured size cap."""


class CPDViolationError(RieszPolError, ValueError):
    """A weight fell below its declared diagonal lower bound."""


class BudgetRefusedError(RieszPolError):
    """An exhaustive search would exceed its combinatorial budget."""


class UnavailableConstantError(RieszPolError):
    """No value of the asymptotic constant is known for the requested (s, d)."""
