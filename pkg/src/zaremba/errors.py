"""Exception hierarchy shared across the toolkit.

Every failure mode maps to one of three broad classes so that the command
line driver can translate exceptions into stable exit codes:

* ``DomainError`` (exit 1): the request itself is malformed, out of range,
  or violates a precondition.
* ``ResourceLimitError`` (exit 2): the request is well formed but would
  exceed an explicit size, memory, or enumeration budget.
* ``InternalConsistencyError`` (exit 3): two independent computations of
  the same quantity disagree.  This always indicates a bug and is never
  raised for bad input.
"""


class ZarembaError(Exception):
    """Base class for all toolkit errors."""


class DomainError(ZarembaError, ValueError):
    """Input outside the documented domain of an operation."""


class ResourceLimitError(ZarembaError, RuntimeError):
    """Request exceeds an explicit enumeration or memory budget."""


class InternalConsistencyError(ZarembaError, RuntimeError):
    """Two ways of computing the same quantity disagreed.  Always a bug."""


class ContinuantOverflowError(DomainError, OverflowError):
    """An exact integer grew past the configured bit-width guard."""


class CensusFileError(ZarembaError, IOError):
    """Base class for census file problems."""


class CensusFormatError(CensusFileError):
    """File is not a census file (bad magic or corrupt framing)."""


class CensusVersionError(CensusFileError):
    """File is a census file written by an unsupported format version."""


class CensusTruncatedError(CensusFileError):
    """File ends before the declared payload is complete."""
