"""Exceptions raised across the toolkit"""


class DocTabError(Exception):
    """Base class for every error the toolkit raises on purpose."""


class TableStructureError(DocTabError):
    """A table or header tree cannot be built from its input."""


class CoordinateResolutionError(DocTabError):
    def __init__(self, coord, depth: int, index: int, available: int):
        self.coord = coord
        self.depth = depth
        self.index = index
        self.available = available
        super().__init__(
            f"coordinate {coord} does not resolve at depth {depth}: "
            f"index {index} but only {available} node(s) at that level"
        )


class HtmlInputError(DocTabError):
    """The HTML input does not contain exactly one table."""


class TableValidationError(DocTabError):
    def __init__(self, report):
        self.report = report
        super().__init__("table failed validation: " + "; ".join(report.errors))


class UndefinedMetricError(DocTabError):
    pass


class ConfigurationError(DocTabError):
    pass


class ProviderError(DocTabError):
    """A provider backend failed to answer."""


class TranscriptMissError(ProviderError):
    def __init__(self, provider: str, fingerprint: str):
        self.provider = provider
        self.fingerprint = fingerprint
        super().__init__(f"no recorded {provider} response for request {fingerprint}")


class ResponseParseError(DocTabError):
    retryable = True


class PlanVerificationError(ResponseParseError):
    def __init__(self, declared_rows: int, left_leaves: int, declared_cols: int, top_leaves: int):
        self.declared_rows = declared_rows
        self.left_leaves = left_leaves
        self.declared_cols = declared_cols
        self.top_leaves = top_leaves
        problems = []
        if declared_rows != left_leaves:
            problems.append(f"declared {declared_rows} rows but the row header has {left_leaves} leaves")
        if declared_cols != top_leaves:
            problems.append(f"declared {declared_cols} columns but the column header has {top_leaves} leaves")
        super().__init__("; ".join(problems))


class AssemblyError(DocTabError):
    def __init__(self, message: str, missing=()):
        self.missing = tuple(missing)
        super().__init__(message)


class StageFailure(DocTabError):
    def __init__(self, stage: str, cause: Exception, retries: int, partial: dict | None = None):
        self.stage = stage
        self.cause = cause
        self.retries = retries
        self.partial = partial or {}
        super().__init__(f"{stage} stage failed after {retries} retr{'y' if retries == 1 else 'ies'}: {cause}")


class InputFormatError(DocTabError):
    def __init__(self, path, line: int, field: str, message: str):
        self.path = str(path)
        self.line = line
        self.field = field
        super().__init__(f"{path}:{line}: field '{field}': {message}")
