"""Exception types shared across the package."""


class DmolabError(Exception):
    """Base class for all package errors."""


class BasisError(DmolabError):
    """Basis descriptor and operator/basis mismatch errors."""


class ValidationError(DmolabError):
    """Numerical-contract violations (non-Hermitian input, unnormalized state, ...)."""


class PreconditionError(DmolabError):
    """A stated precondition does not hold (e.g. cutoff too small)."""


class LabelError(DmolabError):
    """Inconsistent quantum-number labels."""


class RangeError(DmolabError):
    """Requested size exceeds the feasible range of a construction."""


class ResourceError(DmolabError):
    """Requested computation exceeds the supported problem size."""
