"""Exception hierarchy shared by every layer of the package."""


class CremerLabError(Exception):
    """Base class; ``exit_code`` is what the CLI returns when this escapes."""

    exit_code = 1


class BadInput(CremerLabError, ValueError):
    exit_code = 1


class Infeasible(CremerLabError):
    exit_code = 2


class Undecided(CremerLabError):
    exit_code = 3


# numerics
class LazyExponent(Infeasible):
    """A lazily stored count was used where an exact integer is required."""


class PrecisionExhausted(Undecided):
    pass


class UndecidedComparison(Undecided):
    pass


# rotations
class LazyLevel(Infeasible):
    pass


class UndecidedMin(Undecided):
    def __init__(self, msg, indices=()):
        super().__init__(msg)
        self.indices = tuple(indices)


class RootOfUnity(Undecided):
    pass


# seedforge
class DepthInfeasible(Infeasible):
    pass


class UndecidedBoundary(Undecided):
    pass


# cremermap
class InsufficientDepth(Undecided):
    def __init__(self, msg, needed_level=None):
        super().__init__(msg)
        self.needed_level = needed_level


class ResonantDivisor(Undecided):
    pass


# dynsim / perk
class OrderBoundExceeded(Undecided):
    pass


class NonConvergent(CremerLabError):
    pass


class DegenerateOrder(BadInput):
    pass
