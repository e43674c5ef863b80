"""Exception hierarchy shared by all greenfix modules."""


class GreenfixError(Exception):
    """Base class for every error raised by the package."""


class InvalidInterval(GreenfixError):
    def __init__(self, T, eps):
        super().__init__(f"interval length T={T!r} rejected: |sin T| <= {eps:g}")
        self.T = T


class OutOfDomain(GreenfixError):
    pass


class EmptyFamily(GreenfixError):
    pass


class BadCutoff(GreenfixError):
    pass


class MeshMismatch(GreenfixError):
    pass


class ComponentOutOfRange(GreenfixError):
    pass


class UnknownSystem(GreenfixError):
    pass


class EnvelopeViolation(GreenfixError):
    pass


class MalformedConfig(GreenfixError):
    pass


class NoConvergence(GreenfixError):
    """Raised by :func:`greenfix.solver.solve` in strict mode; carries the trace."""

    def __init__(self, result):
        super().__init__(
            f"no convergence after {result.iterations} iterations "
            f"(last delta {result.iterate_deltas[-1]:.3e})"
        )
        self.result = result
