"""Exception hierarchy shared by all modules."""


class SymplabError(Exception):
    """Base class for all errors raised by symplab."""


class DegenerateFormError(SymplabError):
    """The ambient 2-form is (numerically) singular at an evaluation point."""


class NotUnimodularError(SymplabError, ValueError):
    pass


class NotSymplecticMapError(SymplabError):
    pass


class NotClosedError(SymplabError):
    """A 1-form handed to the Hodge splitting is not closed.

    The offending sup-norm of ``d alpha`` is kept in :attr:`residual`.
    """

    def __init__(self, residual, tol):
        super().__init__(f"1-form is not closed: |d alpha| = {residual:.3e} > {tol:.3e}")
        self.residual = residual
        self.tol = tol


class NonZeroMeanError(SymplabError, ValueError):
    pass


class FoldingError(SymplabError):
    """A grid map lost orientation (non-positive Jacobian somewhere)."""


class ImmersionError(SymplabError):
    pass


class NotSymplecticSurfaceError(SymplabError):
    pass


class AreaMismatchError(SymplabError):
    pass


class PositivityError(SymplabError):
    """The linear path of area densities leaves the positive cone."""


class ScenarioError(SymplabError, ValueError):
    pass
