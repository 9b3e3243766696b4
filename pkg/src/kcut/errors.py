"""Domain errors raised across the package."""

from dataclasses import FrozenInstanceError as ImmutabilityViolation  # noqa: F401


class KcutError(Exception):
    """Base class for k-cut domain errors."""


class DimensionMismatch(KcutError, ValueError):
    """Two distributions with different stack sizes were combined."""


class ModelOutOfRange(KcutError, ValueError):
    """A continuous cut model cannot be discretized at the given stack size."""


class EmptyRecords(KcutError, ValueError):
    """A cut-record set with zero total observations."""


class UnderdeterminedFit(KcutError, ValueError):
    """Too few nonzero bins to fit the requested model family."""


class AdjustmentExhaustsRiskLimit(KcutError, ValueError):
    """The adjustment bound meets or exceeds the risk limit; raise k."""


class BudgetUnreachable(KcutError, ValueError):
    """No cut count within the search cap meets the adjustment budget."""


class SessionFinalized(KcutError):
    """A draw was recorded against a session in a terminal state."""


class InsufficientData(KcutError, ValueError):
    """An estimator was invoked on an empty sample."""


class MalformedManifest(KcutError, ValueError):
    """A ballot manifest failed structural validation."""


class EngineContractViolation(KcutError):
    """An audit engine returned different outputs for identical inputs."""
