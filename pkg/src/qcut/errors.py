"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class QcutError(Exception):
    exit_code = 1


class ValidationError(QcutError):
    exit_code = 2


class SchemaError(ValidationError):
    pass


class PartitionMissing(ValidationError):
    def __init__(self, msg="partition required"):
        super().__init__(msg)


class NotAnMcx(ValidationError):
    pass


class UncuttableCrossing(ValidationError):
    pass


class InvalidAssignment(ValidationError):
    pass


class UnsupportedSplit(QcutError):
    exit_code = 3


class NoCutNeeded(UnsupportedSplit):
    pass


class ObservableError(QcutError):
    exit_code = 4


class ObservableSpansCut(ObservableError):
    pass


class QubitOutOfRange(ObservableError):
    pass


class SizeLimitExceeded(QcutError):
    exit_code = 5


class TooManyBranches(SizeLimitExceeded):
    pass


class IntractableEnumeration(SizeLimitExceeded):
    pass
