"""Exception types shared across the package."""


class UnreachableTargetError(ValueError):
    """A foot target lies outside the leg's reachable annulus."""

    def __init__(self, message, point=None, index=None):
        super().__init__(message)
        self.point = point
        self.index = index


class UnreachableTrajectoryError(UnreachableTargetError):
    """Some point of a planned foot trajectory cannot be reached."""


class SingularJacobianError(ValueError):
    pass


class NoFeasiblePointError(RuntimeError):
    pass


class JointLimitError(ValueError):
    pass


class PlanInvariantError(RuntimeError):
    """A built gait plan violates one of its invariants.

    ``invariant`` names the violated property, ``index`` the first offending sample.
    """

    def __init__(self, invariant, message, index=None):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant
        self.index = index


class NonMonotoneTimeError(ValueError):
    pass


class EmptySeriesError(ValueError):
    pass
