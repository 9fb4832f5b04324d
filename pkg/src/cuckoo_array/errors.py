"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An input broke a documented precondition (shape, range, ordering)."""


class DegenerateExcitationError(ValueError):
    """Every amplitude is zero, so the pattern cannot be normalized."""


class NoSidelobeRegionError(ValueError):
    """The main lobe covers the whole sampled grid."""


class ObjectiveEvaluationError(RuntimeError):
    """Raised when the objective fails for a particular nest.

    Carries the iteration (``None`` during initialization) and nest index
    so a failing run can be traced back to its position in the loop.
    """

    def __init__(self, message, iteration=None, nest_index=None):
        self.iteration = iteration
        self.nest_index = nest_index
        where = f"nest {nest_index}"
        if iteration is not None:
            where = f"iteration {iteration}, " + where
        super().__init__(f"{where}: {message}")
