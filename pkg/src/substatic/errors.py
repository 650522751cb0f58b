"""Exception types shared across the package."""


class DomainError(ValueError):
    """A radius, graph or time lies outside the region where a model is defined."""


class ModelError(ValueError):
    """The model data are inconsistent (negative radicand, f <= 0 inside the domain, ...)."""


class DegenerateHorizonError(ModelError):
    """The horizon is not a regular level set of f (surface gravity ~ 0)."""


class MeanConvexityError(ValueError):
    """A functional needing H > 0 met a hypersurface with H <= 0 somewhere."""


class GraphError(ValueError):
    """A radial graph is under-resolved or has lost the graph property."""
