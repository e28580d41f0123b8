"""Exception hierarchy shared by all modules."""


class FindefError(Exception):
    pass


class StructureError(FindefError, ValueError):
    """Malformed structure text or inconsistent structure data."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FormulaSyntaxError(FindefError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"at position {position}: {message}"
        super().__init__(message)


class UnknownSymbolError(FindefError, LookupError):
    pass


class ArityError(FindefError, ValueError):
    pass


class UnboundVariableError(FindefError, ValueError):
    pass


class LimitExceeded(FindefError, RuntimeError):
    pass


class MapFormatError(FindefError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NotDefinable(FindefError):
    """Raised where a definable target is required; carries the Violation."""

    def __init__(self, certificate):
        self.certificate = certificate
        super().__init__(f"target is not definable: {certificate}")


class Definable(FindefError):
    """Raised where a non-definable target is required; carries the DefiningFormula."""

    def __init__(self, certificate):
        self.certificate = certificate
        super().__init__("target is definable")
