"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class MeshError(RuntimeError):
    """A mesh failed construction or manifold validation."""


class QualityError(MeshError):
    """A triangle is too degenerate for the cotangent discretization."""


class SolverError(RuntimeError):
    """The eigensolver could not factorize or converge."""
