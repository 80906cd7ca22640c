"""Exception types shared across modules."""


class BrambleForgeError(Exception):
    pass


class BudgetExceeded(BrambleForgeError):
    """An exact search ran out of budget.

    ``bounds`` carries the best (lower, upper) pair known at the time, when
    the search in question produces one.
    """

    def __init__(self, message, bounds=None):
        super().__init__(message)
        self.bounds = bounds


class Infeasible(BrambleForgeError):
    """No linkage exists between the requested terminal sets."""

    def __init__(self, message, flow_value=None):
        super().__init__(message)
        self.flow_value = flow_value


class DisconnectedPair(BrambleForgeError):
    pass


class MaxRoundsExceeded(BrambleForgeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class GameNotConverged(BrambleForgeError):
    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class CliqueTooSmall(BrambleForgeError):
    pass


class DegenerateParameters(BrambleForgeError):
    def __init__(self, message, params=None):
        super().__init__(message)
        self.params = params
