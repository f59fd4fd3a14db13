"""Exception hierarchy shared by the polygon, Picard and adjoint utilities."""


class KeelError(Exception):
    """Base class for every error raised by the level/keel toolkit."""


class InputError(KeelError):
    """Malformed CLI input; `field` names the offending JSON field or flag."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message


# Polygon calculus
class DegenerateInput(KeelError):
    pass


class Unbounded(KeelError):
    pass


class NonLatticeVertices(KeelError):
    pass


# Picard lattices
class ModelMismatch(KeelError):
    pass


class UnsupportedRank(KeelError):
    pass


class Undecided(KeelError):
    pass


class NotContractible(KeelError):
    pass


# Adjoint engine
class NotNef(KeelError):
    pass


class NotBig(KeelError):
    pass


class NonTerminating(KeelError):
    pass


class UnknownEndpoint(KeelError):
    pass


class ChainInvariantError(KeelError):
    pass


class BadN(KeelError):
    pass


# Oracles
class DegenerateSample(KeelError):
    """Two pseudo-random samples disagree, so one of them is in special position."""
