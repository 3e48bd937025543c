"""Exception types shared across the pipeline."""


class AntwatchError(Exception):
    """Base class for all antwatch errors."""


class LoadError(AntwatchError):
    """An artifact on disk is missing, malformed, or inconsistent."""


class ConfigError(AntwatchError):
    """A configuration document failed to parse or validate."""


class CorrectionError(AntwatchError):
    """A walk-tree correction referenced an unknown or stale branch."""


class UntrainedModelError(AntwatchError):
    """An operation required a trained model that is not available."""
