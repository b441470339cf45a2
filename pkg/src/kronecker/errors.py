"""Exception hierarchy shared by all modules."""


class KroneckerError(Exception):
    """Base class for library errors."""


class ConfigurationError(KroneckerError, ValueError):
    """An experiment configuration violates one of its bounds."""


class ArgumentError(KroneckerError, ValueError):
    """An operation received arguments outside its domain."""


class ResourceError(KroneckerError):
    """The requested computation exceeds the diagnostic budget."""


class ResonantSingularityError(KroneckerError, ArithmeticError):
    """A Fourier term was requested at an (almost) exact resonance."""


class SingularTermError(KroneckerError, ArithmeticError):
    """A resonant term has a vanishing normalized denominator."""


class DegenerateDirectionError(KroneckerError, ArithmeticError):
    """A flow direction is (numerically) parallel to a binding face."""


class ConditioningError(KroneckerError, ArithmeticError):
    """Lattice reduction failed on a numerically degenerate basis."""


class SamplingError(KroneckerError, RuntimeError):
    """A rejection sampler exhausted its iteration cap."""


class DegenerateTestError(KroneckerError, ValueError):
    """A statistical test has too few effective bins to be meaningful."""


class ConsistencyError(KroneckerError, RuntimeError):
    """Two routes to the same quantity disagree (indicates a bug)."""
