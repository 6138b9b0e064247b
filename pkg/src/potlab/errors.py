class PotlabError(Exception):
    """Base class for errors raised by potlab."""


class DomainError(PotlabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class NearSingularityError(PotlabError, ValueError):
    """Evaluation point too close to the source for direct quadrature.

    Interior and near-boundary values of ball potentials are available from
    the closed forms in :mod:`potlab.potentials`.
    """


class ConvergenceRegionError(PotlabError, ValueError):
    """Evaluation point outside the region where a series expansion converges."""


class DegenerateInputError(PotlabError, ValueError):
    pass
