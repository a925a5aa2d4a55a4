from __future__ import annotations


class QcorrException(Exception):
    pass


class InvalidStateError(QcorrException):
    pass


class DimensionError(QcorrException):
    pass


class NotHermitianError(QcorrException):
    pass


class SolverError(QcorrException):
    pass


class IterationLimitError(SolverError):
    def __init__(self, message, solution=None):
        super(IterationLimitError, self).__init__(message)
        self.solution = solution


class UnregisteredObservableError(QcorrException):
    pass


class MappingMismatchError(QcorrException):
    pass


class ClassificationError(QcorrException):
    pass


class ConfigError(QcorrException):
    pass
