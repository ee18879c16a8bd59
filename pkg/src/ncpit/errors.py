"""Exception types shared across the package."""


class NcpitError(Exception):
    """Base class for all library errors."""


class ShapeError(NcpitError, ValueError):
    """Dimension or arity mismatch."""


class DomainMismatchError(NcpitError, TypeError):
    """Operands live over different scalar domains."""


class ParameterError(NcpitError, ValueError):
    """An argument violates an operation's precondition."""


class DecodeError(NcpitError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ParseError(NcpitError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ResourceError(NcpitError):
    """A configured size cap was exceeded."""


class PromiseViolation(NcpitError):
    """The caller-supplied degree/sparsity promise does not hold."""


class OracleInconsistency(NcpitError):
    """Black-box answers are not consistent with any ABP of the declared shape."""
