"""Exception hierarchy shared by all modules."""


class CantorDynError(ValueError):
    """Base class for contract violations raised by this package."""


class AlphabetMismatch(CantorDynError):
    pass


class NotInFullGroup(CantorDynError):
    """Raised when a map is not an element of the topological full group of T.

    ``pair`` holds the first offending (u, v, t) triple.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NotPeriodic(CantorDynError):
    pass


class RefinementImpossible(CantorDynError):
    pass


class AtomicMeasure(CantorDynError):
    """A measure with atoms was supplied where only continuous ones are allowed."""


class BudgetUnreachable(CantorDynError):
    pass


class EmptyComplement(CantorDynError):
    pass


class NoStrictMatch(CantorDynError):
    pass


class ConstraintUnsatisfiable(CantorDynError):
    pass
