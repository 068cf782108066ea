from django.core.exceptions import ImproperlyConfigured


class ChannelNetError(Exception):
    """Base class for every error raised by the toolkit."""


class ContractViolation(ChannelNetError, ValueError):
    """Shapes, lengths or label ranges disagree with an operation's contract."""


class ConfigurationError(ChannelNetError, ImproperlyConfigured):
    """An unsupported scenario, constellation or config-file entry."""


class NotSPDError(ChannelNetError):
    """Cholesky factorization failed: the matrix is not symmetric positive definite."""


class RankDeficientChannelError(ChannelNetError):
    """HᵀH is singular, so zero-forcing style equalization is undefined."""


class InstanceTooLargeError(ChannelNetError):
    """The exhaustive search space exceeds the configured candidate cap."""


class ForwardDivergedError(ChannelNetError):
    def __init__(self, iteration):
        self.iteration = iteration
        super().__init__(f"forward diverged: non-finite features at iteration {iteration}")


class TrainingDivergedError(ChannelNetError):
    def __init__(self, epoch, checkpoint=None):
        self.epoch = epoch
        self.checkpoint = checkpoint
        message = f"non-finite loss during epoch {epoch}"
        if checkpoint is not None:
            message += f"; last good checkpoint retained at {checkpoint}"
        super().__init__(message)


class CheckpointError(ChannelNetError):
    """A checkpoint file is corrupt, truncated or does not match its config."""
