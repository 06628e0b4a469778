"""Exception types shared across the library."""


class ZenopathError(Exception):
    """Base class for all errors raised by this package."""


class NonHermitianInput(ZenopathError):
    """Matrix failed the Hermiticity check."""


class NotPositiveSemidefinite(ZenopathError):
    """Operator has an eigenvalue below the PSD tolerance."""


class DimensionMismatch(ZenopathError):
    """Operands live on spaces of different dimension."""


class NoGap(ZenopathError):
    """All eigenvalues lie inside the ground band; no spectral gap exists."""


class SupportOutOfRange(ZenopathError):
    """A term's support references a qubit outside the register."""


class IndexOutOfRange(ZenopathError, IndexError):
    """Step index outside the discretized path."""


class NotNormalizedTerm(ZenopathError):
    """Local term spectrum is not contained in [0, 1] with minimum 0."""


class ZeroSuccessProbability(ZenopathError):
    """Success-conditioned channel is undefined: success probability is 0."""


class ZeroGroundOverlap(ZenopathError):
    """State has no overlap with the ground space."""


class KMaxExceeded(ZenopathError):
    """Adaptive repetition hit its cap before reaching the target distance."""


class NonConvergent(ZenopathError):
    """Step-count search exceeded its hard limit."""


class DegeneratePath(ZenopathError):
    """Path has zero step differences everywhere; the quantity is undefined."""


class NonCommutingGenerators(ZenopathError):
    """Pauli generator set is not mutually commuting."""


class DependentGenerators(ZenopathError):
    """Pauli generator set is linearly dependent over GF(2)."""


class UnsatisfiableInstance(ZenopathError):
    """SAT instance has no satisfying assignment."""


class ConstructionFailed(ZenopathError):
    """Random instance generation did not produce a valid instance."""


class FrustrationFreeViolation(ZenopathError):
    """A path step has strictly positive ground energy."""


class ConfigError(ZenopathError):
    """Config or instance file could not be parsed or validated."""
