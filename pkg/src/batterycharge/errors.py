"""Exception and warning types shared by all modules."""


class BatteryError(Exception):
    """Base class for all package errors."""


class ConfigError(BatteryError, ValueError):
    """Invalid user-supplied configuration (CLI or sweep settings)."""


class InvalidSpec(ConfigError):
    """Non-positive frequency or inverse temperature."""


class InvalidAngle(BatteryError, ValueError):
    pass


class IndexOutOfRange(BatteryError, IndexError):
    pass


class InconsistentDeltaE(BatteryError, ValueError):
    """Claimed energy input disagrees with the one implied by a transition ledger."""


class EnergyExceedsDimension(BatteryError, ValueError):
    pass


class ZeroTemperatureUnsupported(BatteryError, ValueError):
    pass


class NumericalError(BatteryError, ArithmeticError):
    """Base class for convergence and truncation failures."""


class TruncationTooSmall(NumericalError):
    pass


class PhaseLimitExceeded(NumericalError):
    pass


class DimensionCapExceeded(NumericalError):
    pass


class InfeasibleSqueezing(BatteryError, ValueError):
    """Squeezing alone would inject more energy than requested."""


class ConvergenceFailure(NumericalError):
    pass


class NotBracketed(NumericalError):
    pass


class GridTooFine(NumericalError):
    pass


class GridInsufficient(NumericalError):
    pass


class TruncationWarning(UserWarning):
    pass
