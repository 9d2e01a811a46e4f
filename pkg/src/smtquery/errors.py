"""Exception hierarchy shared across the package."""


class SMTQueryError(Exception):
    pass


class ParseError(SMTQueryError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class IntelError(SMTQueryError):
    pass


class TransformError(SMTQueryError):
    pass


class UnknownPredicate(SMTQueryError):
    pass


class UnknownSolver(SMTQueryError):
    pass


class UnknownFunction(SMTQueryError):
    pass


class UnknownExtractor(SMTQueryError):
    pass


class UnknownDataset(SMTQueryError):
    pass


class SolverUnavailable(SMTQueryError):
    pass


class SpawnError(SolverUnavailable):
    pass


class ModelParseError(SMTQueryError):
    pass


class ConfigError(SMTQueryError):
    pass


class SchemaExists(SMTQueryError):
    pass


class ForeignKeyViolation(SMTQueryError):
    pass


class QuerySyntaxError(SMTQueryError):
    def __init__(self, message, column):
        self.column = column
        super().__init__(f"{message} at column {column}")
