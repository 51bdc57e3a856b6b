"""Exception types raised across the package."""


class QErgodicError(Exception):
    """Base class for all package errors."""


class CapacityExceeded(QErgodicError):
    pass


class ModeOutOfWindow(QErgodicError, ValueError):
    def __init__(self, modes, window):
        self.modes = sorted(modes)
        self.window = window
        super().__init__(f"modes {self.modes} lie outside window {window}")


class WindowTooSmall(QErgodicError, ValueError):
    def __init__(self, message, required=None):
        self.required = required
        if required is not None:
            message = f"{message} (minimal window: {required})"
        super().__init__(message)


class GramDegenerate(QErgodicError):
    pass


class ParameterOutOfRange(QErgodicError, ValueError):
    pass


class GammaOutOfRange(ParameterOutOfRange):
    pass


class LambdaOutOfRange(ParameterOutOfRange):
    pass


class SupportsOverlap(QErgodicError, ValueError):
    pass


class FactorialBlowup(QErgodicError, ValueError):
    pass


class UnknownLabel(QErgodicError, KeyError):
    pass


class KeyConcatenationInvalid(QErgodicError, ValueError):
    pass


class ParseError(QErgodicError, ValueError):
    pass
