"""Exception hierarchy shared by every module in the package."""


class TwpaError(Exception):
    """Base class for all domain errors raised by rpmtwpa."""


class NonPositiveInput(TwpaError, ValueError):
    pass


class NegativeCapacitance(TwpaError, ValueError):
    """The requested coupling capacitance leaves no room for a non-negative C_0."""


class ZeroDenominator(TwpaError, ZeroDivisionError):
    pass


class AtPole(TwpaError, ArithmeticError):
    """Evaluation requested (numerically) at the resonator pole."""


class Stopband(TwpaError, ArithmeticError):
    """No propagating wave exists at the requested frequency."""


class DegeneratePump(TwpaError, ValueError):
    """Signal and idler coincide, so the two-mode quadrature angle is ill defined."""


class InvalidCell(TwpaError, ValueError):
    """A (C_c, C_r) pair that cannot be completed into a physical unit cell."""


class EmptyBand(TwpaError, ValueError):
    pass


class NoFeasiblePoint(TwpaError, RuntimeError):
    pass


class ConfigError(TwpaError, ValueError):
    """Run configuration could not be parsed or validated."""
