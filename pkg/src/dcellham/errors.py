"""Exception hierarchy shared by all dcellham modules."""


class DCellError(Exception):
    """Base class for all dcellham errors."""

    code = "error"


class ParameterError(DCellError):
    """A caller-supplied parameter is outside its valid domain."""

    code = "parameter"


class UnsupportedParametersError(ParameterError):
    """The requested operation is provably impossible for these parameters
    (e.g. a Hamiltonian path in the 6-cycle between non-adjacent vertices)."""

    code = "unsupported"


class ResourceLimitError(DCellError):
    """The requested construction exceeds a configured size cap."""

    code = "resource-limit"


class FaultBoundError(ParameterError):
    """The fault set is larger than the bound the construction supports."""

    code = "fault-bound"


class InfeasibleError(DCellError):
    """A constrained permutation or arrangement does not exist."""

    code = "infeasible"


class ConstructionError(DCellError):
    """An internal constructive step failed; callers may retry with the
    next deterministic candidate."""

    code = "construction"


class InvariantViolationError(DCellError):
    """A construction that is guaranteed to succeed failed; indicates a bug."""

    code = "invariant"


class CertificationError(DCellError):
    """A base-case certification check did not pass."""

    code = "certification"


class ExhaustedError(DCellError):
    """An enumeration has no further elements."""

    code = "exhausted"
