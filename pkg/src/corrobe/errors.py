"""Exception hierarchy shared across the pipeline stages."""


class CorrobeError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CorrobeError):
    """Bad or missing configuration (unknown corruption kind, malformed params file)."""


class InputError(CorrobeError):
    """Invalid caller-supplied data (empty image, unknown instance id, dimension mismatch)."""


class FormatError(CorrobeError):
    """A data file does not conform to its documented format."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = ""
        if path is not None:
            loc = f"{path}"
            if line is not None:
                loc += f":{line}"
            loc = f" [{loc}]"
        super().__init__(f"{message}{loc}")
        self.path = path
        self.line = line


class StageError(CorrobeError):
    """A pipeline stage was invoked before its upstream stage produced its artifacts."""

    def __init__(self, missing_stage: str, detail: str = ""):
        msg = f"missing upstream stage: {missing_stage}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.missing_stage = missing_stage
