"""Exception types shared across the package."""


class HPPError(Exception):
    """Base class for all errors raised by hppswitch."""


class PromiseViolated(HPPError):
    """The gates do not satisfy the promise for any label y."""


class NonDeterministicMeasurement(HPPError):
    """A measured control register was not (close to) a basis state."""


class ReadoutAmbiguous(NonDeterministicMeasurement):
    """Switch readout found no single dominant basis amplitude."""


class TreeSpecError(HPPError, ValueError):
    """Malformed composition-tree specification string."""
