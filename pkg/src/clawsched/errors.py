"""Exception types shared across the package."""


class ClawschedError(Exception):
    """Base class for all package errors."""


class UnknownTransceiver(ClawschedError, KeyError):
    def __init__(self, tid):
        super().__init__(f"unknown transceiver id: {tid!r}")
        self.tid = tid


class NeighborCapExceeded(ClawschedError):
    """A transceiver has more neighbors than the configured cap K."""

    def __init__(self, tid: int, count: int, cap: int):
        super().__init__(f"transceiver {tid} has {count} neighbors (cap K={cap})")
        self.tid = tid
        self.count = count
        self.cap = cap


class SpecViolation(ClawschedError, ValueError):
    """A topology spec does not satisfy its structural invariants."""


class EdgeAlreadyPresent(ClawschedError, ValueError):
    pass


class NoMissingEdges(ClawschedError):
    pass


class InvalidPermutation(ClawschedError, ValueError):
    pass


class BudgetExceeded(ClawschedError):
    """The exact solver ran out of node expansions."""

    def __init__(self, budget: int):
        super().__init__(f"exact MWIS search exceeded budget of {budget} node expansions")
        self.budget = budget


class ArtifactIOError(ClawschedError, OSError):
    """Reading or writing an output file failed."""
