"""Custom exceptions for the simulator."""


class DomainError(Exception):
    """Exception raised when a scalar argument lies outside its domain."""
    pass


class ValidationError(Exception):
    """Exception raised when a material tensor fails its axioms."""
    pass


class ConfigError(Exception):
    """Exception raised when configuration is invalid."""
    pass


class HypothesisError(ConfigError):
    """Exception raised when a study configuration violates a structural requirement."""
    pass


class ConstraintError(Exception):
    """Exception raised when an adhesion field is inadmissible."""
    pass


class SingularSystemError(Exception):
    """Exception raised when a linear system cannot be solved."""
    pass


class NonConvergenceError(Exception):
    """Exception raised when Newton iterations exceed their budget."""

    def __init__(self, message: str, residual: float = float('nan'), iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class AssemblyError(Exception):
    """Exception raised when finite-element assembly fails."""
    pass


class GridMismatchError(Exception):
    """Exception raised when fields live on incompatible grids."""
    pass


class StorageError(Exception):
    """Exception raised when file storage operation fails."""
    pass


class CertificationError(Exception):
    """Exception raised when a trajectory fails certification."""
    pass
