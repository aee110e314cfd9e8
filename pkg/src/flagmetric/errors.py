"""Exception types raised by flagmetric."""


class FlagError(Exception):
    """Base class for all flagmetric errors."""


class BadDimensions(FlagError, ValueError):
    """Array shapes do not match the owning flag."""


class DegenerateGrid(FlagError, ValueError):
    """The sampled map fails to be an immersion somewhere on the grid."""


class NotADiffeo(FlagError, ValueError):
    """A reparameterization has non-positive Jacobian or breaks periodicity."""


class NotSymmetric(FlagError, ValueError):
    """A metric perturbation that must be symmetric is not."""


class UnknownShape(FlagError, KeyError):
    """Requested synthetic shape is not known."""


class LineSearchFailed(FlagError, RuntimeError):
    """Backtracking could not find a step satisfying the Armijo condition."""
