"""Exception hierarchy shared by all modules."""


class FrrError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FrrError, ValueError):
    """An argument lies outside the operation's domain."""


class RangeError(DomainError):
    """A curve lookup was requested outside the tabulated inertia range."""


class NumericalError(FrrError, ArithmeticError):
    """Integration produced non-finite values or an iteration cap was hit."""


class Infeasible(FrrError):
    """Even full headroom cannot hold the nadir above the UFLS threshold."""


class NonMonotone(FrrError):
    """Nadir was observed to decrease as reserve increased."""


class InputError(FrrError, ValueError):
    """An input file could not be parsed.

    ``source`` and ``line`` locate the offending record when known.
    """

    def __init__(self, message, source=None, line=None):
        self.source = source
        self.line = line
        where = ""
        if source is not None:
            where = f"{source}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
