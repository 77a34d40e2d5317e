"""Exception hierarchy. The CLI maps these onto exit codes."""


class EaqecError(Exception):
    """Base class for all package-specific failures."""


class SizeError(EaqecError):
    """Requested dense object exceeds the configured dimension cap."""


class ContractError(EaqecError, ValueError):
    """Input violates a documented precondition (shape, hermiticity, orthonormality)."""


class InvalidStabilizerError(EaqecError):
    """Generator set is inconsistent (a phase dependency puts -I in the group)."""


class NotCorrectableError(EaqecError):
    """The erased set (or error list) fails the correctability conditions."""


class StructureViolationError(EaqecError):
    """Certification of the isometry/shared-state factorization failed."""


class ConsistencyError(EaqecError):
    """Two internally equivalent computations disagree beyond tolerance."""


class ModelMismatchError(EaqecError):
    """Requested error model is not valid for the given EA strategy."""
