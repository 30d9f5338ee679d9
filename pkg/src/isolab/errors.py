"""Exception hierarchy shared by all isolab modules."""


class IsolabError(Exception):
    """Base class for all isolab errors."""


class DomainError(IsolabError, ValueError):
    """Input outside a declared domain (parameter range, interval, box)."""


class GeometryError(IsolabError, ValueError):
    """Geometric invariant violated (non-planar facet, apex outside, non-convex)."""


class ConvergenceError(IsolabError, RuntimeError):
    """A numerical routine failed to converge at the requested tolerance."""


class CheckFailedError(IsolabError):
    """A requested verification check evaluated to a negative verdict."""
