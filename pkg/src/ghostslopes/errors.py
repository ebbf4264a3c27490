"""Exception types shared by the package."""


class ParameterError(ValueError):
    """An input violates a parameter constraint (non-prime p, a out of range, ...)."""


class DomainError(ValueError):
    """A well-formed input lies outside the domain of an operation."""


class UncertifiedTruncation(RuntimeError):
    """No certified Newton polygon vertex was found within the enumeration cap."""


class RecursionInvariantError(RuntimeError):
    """The slope recursion reached a state its construction rules out.

    ``path`` lists the ``(s_eps, k)`` calls from the top-level query down to
    the failing one.
    """

    def __init__(self, message, path=()):
        self.path = tuple(path)
        if self.path:
            message = f"{message} [path: {' -> '.join(f'(s={s}, k={k})' for s, k in self.path)}]"
        super().__init__(message)


class MissingDimension(KeyError):
    """A dimension table lacks an entry the recursion needs."""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing dimension"
