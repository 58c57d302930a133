"""Engine error hierarchy.

Every error carries a stable ``code`` string so the HTTP layer and the CLI
can surface failures without leaking stack traces.
"""

from __future__ import annotations


class SleuthError(Exception):
    """Base class for all engine errors."""

    code = "ENGINE_ERROR"

    def __init__(self, message: str = "", **detail):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.detail = detail

    def as_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


# --- ingest ---------------------------------------------------------------

class MalformedRecord(SleuthError):
    code = "MALFORMED_RECORD"


class FileNotFound(SleuthError):
    code = "FILE_NOT_FOUND"


class EmptyCorpus(SleuthError):
    code = "EMPTY_CORPUS"


class InvalidConfig(SleuthError):
    code = "INVALID_CONFIG"


# --- store ----------------------------------------------------------------

class DuplicateViewId(SleuthError):
    code = "DUPLICATE_VIEW_ID"


class InvalidViewDef(SleuthError):
    code = "INVALID_VIEW_DEF"


class QuerySyntaxError(SleuthError):
    code = "QUERY_SYNTAX_ERROR"


class InvalidMapping(SleuthError):
    code = "INVALID_MAPPING"


class NodeNotFound(SleuthError):
    code = "NODE_NOT_FOUND"


class GraphInvariantViolation(SleuthError):
    code = "GRAPH_INVARIANT_VIOLATION"


# --- cross-model indexes ----------------------------------------------------

class InvalidJoinSpec(SleuthError):
    code = "INVALID_JOIN_SPEC"


class InvalidInterval(SleuthError):
    code = "INVALID_INTERVAL"


class StaleIndex(SleuthError):
    code = "STALE_INDEX"


# --- query engine -----------------------------------------------------------

class PatternSyntaxError(SleuthError):
    code = "SYNTAX_ERROR"

    def __init__(self, message: str, position: int, expected: list[str] | None = None):
        super().__init__(message, position=position, expected=expected or [])
        self.position = position
        self.expected = expected or []


class UnsupportedFeature(SleuthError):
    code = "UNSUPPORTED_FEATURE"

    def __init__(self, feature: str):
        super().__init__(f"unsupported construct: {feature}", feature=feature)
        self.feature = feature


class UnknownTemplate(SleuthError):
    code = "UNKNOWN_TEMPLATE"


class MissingParameter(SleuthError):
    code = "MISSING_PARAMETER"

    def __init__(self, name: str):
        super().__init__(f"missing required parameter: {name}", parameter=name)
        self.parameter = name


class TypeMismatch(SleuthError):
    code = "TYPE_MISMATCH"

    def __init__(self, name: str, expected: str, got: str = ""):
        super().__init__(
            f"parameter {name} expected {expected}" + (f", got {got}" if got else ""),
            parameter=name, expected=expected, got=got,
        )
        self.parameter = name


class ColumnNotNumeric(SleuthError):
    code = "COLUMN_NOT_NUMERIC"


# --- analytics ---------------------------------------------------------------

class SeriesTooShort(SleuthError):
    code = "SERIES_TOO_SHORT"


class EmptyIntervalSet(SleuthError):
    code = "EMPTY_INTERVAL_SET"


class InvalidK(SleuthError):
    code = "INVALID_K"


class EmptyGraph(SleuthError):
    code = "EMPTY_GRAPH"


# --- exploration sessions ----------------------------------------------------

class IncompatibleModel(SleuthError):
    code = "INCOMPATIBLE_MODEL"


class UnknownAction(SleuthError):
    code = "UNKNOWN_ACTION"


class InvalidArguments(SleuthError):
    code = "INVALID_ARGUMENTS"


class UnknownRelation(SleuthError):
    code = "UNKNOWN_RELATION"


class SchemaMismatch(SleuthError):
    code = "SCHEMA_MISMATCH"


class UnresolvedAmbiguity(SleuthError):
    code = "UNRESOLVED_AMBIGUITY"

    def __init__(self, parameter: str):
        super().__init__(f"unresolved ambiguity for parameter: {parameter}", parameter=parameter)
        self.parameter = parameter


class UnknownVisID(SleuthError):
    code = "UNKNOWN_VIS_ID"


class CorruptArchive(SleuthError):
    code = "CORRUPT_ARCHIVE"


class UnknownSession(SleuthError):
    code = "UNKNOWN_SESSION"
