"""Exception hierarchy shared by every stage of the chain."""


class EogError(Exception):
    """Base class for all eogforge errors."""


class InvalidConfigError(EogError, ValueError):
    """A configuration value is out of its allowed domain.

    ``path`` names the offending field (``"afe.r2"``) when known.
    """

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InvalidScenarioError(EogError, ValueError):
    pass


class AliasingError(InvalidConfigError):
    pass


class ConfigConflictError(InvalidConfigError):
    pass


class DataError(EogError):
    """Input data (log, truth file, stream) is unreadable or inconsistent."""


class ResamplingError(DataError, ValueError):
    pass


class StreamError(DataError, ValueError):
    """Sample stream violates ordering (timestamps must strictly increase)."""


class SerialParseError(DataError, ValueError):
    def __init__(self, line_no, text, reason="malformed line"):
        self.line_no = line_no
        self.text = text
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}: {text!r}")


class CodeRangeError(SerialParseError):
    def __init__(self, line_no, text, code, max_code):
        self.code = code
        self.max_code = max_code
        super().__init__(line_no, text, f"code {code} outside [0, {max_code}]")
