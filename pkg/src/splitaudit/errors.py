"""Exception types raised across the toolkit.

Data problems that are *findings* (e.g. validation violations, leakage) are
returned as report objects, never raised; these exceptions cover contract
violations and unusable inputs only.
"""


class AuditError(Exception):
    """Base class for all toolkit errors."""


class MissingColumn(AuditError):
    def __init__(self, column: str):
        super().__init__(f"mapped column {column!r} not found in header")
        self.column = column


class MalformedRow(AuditError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class EmptyLog(AuditError):
    pass


class DegenerateSplit(AuditError):
    pass


class EmptyEvaluation(AuditError):
    pass


class InvalidRange(AuditError):
    pass


class TypeMismatch(AuditError):
    pass


class EmptySample(AuditError):
    pass


class EmptyTargets(AuditError):
    pass


class EmptyReference(AuditError):
    pass


class ProvenanceMismatch(AuditError):
    pass


class SchemaVersionMismatch(AuditError):
    pass


class MalformedDocument(AuditError):
    pass
