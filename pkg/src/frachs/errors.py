"""Exception types raised by the toolkit."""


class InvalidParameters(ValueError):
    """A problem parameter violates one of the standing hypotheses."""


class SupportOverflowError(ValueError):
    """A rescaled or translated field would leave the computational box."""


class ZeroDenominatorError(ArithmeticError):
    """The Hardy-Sobolev denominator of a quotient vanishes."""


class DegenerateInitError(ValueError):
    """A solver was started from a field that carries no mass."""


class PathCollapseError(RuntimeError):
    """The mountain-pass path no longer crosses the energy ridge."""


class IncompatibleGridError(ValueError):
    """Two objects live on different grids."""
