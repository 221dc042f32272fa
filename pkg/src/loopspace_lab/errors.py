"""Exception types shared across the library.

Every domain error derives from :class:`LoopspaceError` so callers can
catch the whole family at once; the CLI maps them onto exit codes.
"""


class LoopspaceError(Exception):
    """Base class for all errors raised by this library."""


# -- manifold-level -----------------------------------------------------------

class OffManifold(LoopspaceError):
    """A point violates the manifold constraint beyond tolerance."""


class IntegrationDiverged(LoopspaceError):
    """An ODE integration left the manifold beyond the mid-flow tolerance."""


class OutOfInjectivityDomain(LoopspaceError):
    """Logarithm requested at or beyond the cut locus."""


class ShootingFailed(LoopspaceError):
    """Iterative geodesic shooting did not converge."""


class OutOfV(LoopspaceError):
    """A pair of points is outside the invertible range of a local addition."""


class OutsideTube(LoopspaceError):
    """A point is outside the tubular neighbourhood it should project from."""


# -- chart-level --------------------------------------------------------------

class NotInChartDomain(LoopspaceError):
    """Loop is not in the chart codomain U_alpha."""


class NotInOverlap(LoopspaceError):
    """Section image is not in the overlap of the two chart codomains."""


class BaseMismatch(LoopspaceError):
    """Two sections expected over the same base loop disagree."""


# -- geometry-level -----------------------------------------------------------

class GridTooCoarse(LoopspaceError):
    """Path-time grid too short for the requested finite differences."""


class NotPointwiseLinear(LoopspaceError):
    """An operator failed the pointwise-linearity reconstruction contract."""


class SingularFrame(LoopspaceError):
    """An extracted frame matrix is singular beyond tolerance."""


# -- tube-level ---------------------------------------------------------------

class OutsidePatch(LoopspaceError):
    """Base point of a loop lies outside the trivializing chart patch."""


class OutsideAveragingDomain(LoopspaceError):
    """A coset of samples is too spread out to be averaged on the manifold."""


# -- polarization-level -------------------------------------------------------

class SingularSymbol(LoopspaceError):
    """A multiplication-operator symbol is not invertible at some node."""


class IndexUnstable(LoopspaceError):
    """Kernel counts disagree between the two stabilizing truncations."""


# -- experiment runner --------------------------------------------------------

class UnknownSuite(LoopspaceError):
    """Requested verification suite does not exist."""


class ConfigInvalid(LoopspaceError):
    """Experiment configuration violates its invariants."""
