"""Exception types shared across the package."""


class DisfluxError(Exception):
    """Base class for all package errors."""


class InvalidInterface(DisfluxError):
    """Interface index out of range."""


class OutOfBox(DisfluxError):
    """State value outside the extended state box / v-grid range."""


class AmbiguousSide(DisfluxError):
    """Position sits exactly on an interface; a one-sided variant is required."""


class StructuralViolation(DisfluxError):
    """A structural bound (Lipschitz constant, coefficient-jump mass) failed."""


class NotConvex(DisfluxError):
    """Entropy function has negative curvature somewhere on the sampled range."""


class MissingConnection(DisfluxError):
    """No interface connection value available at a required time."""


class GridTooCoarse(DisfluxError):
    """v-grid or mollifier width below the supported resolution."""


class CflViolation(DisfluxError):
    """Time step exceeds the stable CFL bound."""


class GridMismatch(DisfluxError):
    """Two fields live on different grids."""


class MismatchedInterface(DisfluxError):
    """Two germ states do not share the same one-sided fluxes."""


class DomainTooSmall(DisfluxError):
    """Requested ball plus propagation cone exceeds the padded domain."""


class UnsupportedKernelShape(DisfluxError):
    """Kernel is not unimodal or monotone on the state box; the solver refuses."""


class ConfigError(DisfluxError):
    """Problem configuration failed to parse or validate."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])
