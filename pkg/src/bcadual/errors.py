"""Exception hierarchy shared by every layer."""


class BcaError(Exception):
    """Base class for all errors raised by this package."""


class FieldMismatchError(BcaError, ValueError):
    pass


class DescriptorMismatchError(BcaError, ValueError):
    pass


class UnknownVariableError(BcaError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown variable"


class PrecisionError(BcaError, ArithmeticError):
    """A result would depend on coefficients outside a certified window."""


class UnsupportedShapeError(BcaError, NotImplementedError):
    pass


class ParseError(BcaError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)
