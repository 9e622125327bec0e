"""Exception types raised across the package."""


class CrnError(ValueError):
    """Base class for malformed CRNs, configurations and instances."""


class NotApplicable(CrnError):
    pass


class IllegalRun(CrnError):
    """A block of consecutive applications of one rule cannot occur."""


class PreconditionViolated(CrnError):
    """A decision procedure was called outside the class it is correct for."""


class NotVoid2System(PreconditionViolated):
    pass


class NotBipartite(PreconditionViolated):
    pass


class NotUnimolecular(PreconditionViolated):
    pass


class VolumeCapExceeded(CrnError):
    pass


class UnbalancedPartitions(CrnError):
    pass


class MalformedClause(CrnError):
    pass


class InvalidWiring(CrnError):
    pass


class NotBimolecular(CrnError):
    pass


class ParseError(CrnError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
