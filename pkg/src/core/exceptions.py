# src/core/exceptions.py
from typing import Any, Optional


class KoszulScopeError(Exception):
    """Base class for every error raised by the engine"""


class DomainError(KoszulScopeError, ValueError):
    """Argument outside the domain of an operation"""


class UsageError(KoszulScopeError):
    """Invalid run configuration"""


class UndeterminedError(KoszulScopeError):
    """A Known value was requested from a slot the chase left Unknown"""


class ChaseContradiction(KoszulScopeError):
    """Chase rules forced an empty interval"""

    def __init__(self, message: str, trace: Optional[Any] = None):
        super().__init__(message)
        self.trace = trace


class EngineConsistencyError(KoszulScopeError):
    """Two derivations of the same quantity disagree"""


class RegularSequenceError(KoszulScopeError):
    """Hilbert function of a model differs from the Koszul prediction"""


class InconsistentInputError(KoszulScopeError):
    """Model data violates an assumption of the oracle"""


class ModelFormatError(InconsistentInputError):
    """Malformed plain-text model file"""
