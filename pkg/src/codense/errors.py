"""Exception types shared across the package."""


class CodenseError(Exception):
    """Base class for all errors raised by codense."""


class CarrierMismatch(CodenseError, ValueError):
    """Two objects that must live on the same carrier do not."""


class CapExceeded(CodenseError):
    """An exhaustive enumeration or search would exceed its configured size cap."""


class HypothesisViolated(CodenseError, ValueError):
    """A theorem-level precondition does not hold for the supplied instance."""


class InvalidStructure(CodenseError, ValueError):
    """A table-defined structure (map, category, rig, ...) fails its axioms."""
