"""Exception types shared across the package."""


class NdggError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(NdggError):
    """Invalid graph construction input or corrupted graph structure."""


class ShapeError(NdggError):
    """Operand shapes are incompatible."""


class NonFiniteError(NdggError):
    """A computation produced NaN or Inf."""


class ContainerError(NdggError):
    """Base class for dataset container problems."""


class BadMagicError(ContainerError):
    """File does not start with the container magic bytes."""


class TruncatedContainerError(ContainerError):
    """File ended before a declared section was complete."""


class ContainerInvariantError(ContainerError):
    """Container decoded, but the dataset violates an invariant."""


class ConfigError(NdggError):
    """Invalid model or training configuration."""


class ConvergenceError(NdggError):
    """An iterative solver hit its iteration cap before converging."""


class AnalysisError(NdggError):
    """An analysis precondition does not hold (for example lambda2 >= 1)."""


class TrainingError(NdggError):
    """Training aborted (for example on a non-finite loss)."""
