"""Exception types shared across the package."""


class StitsimError(Exception):
    """Base class for package errors."""


class InvalidPolygon(StitsimError):
    """Vertex list does not describe a valid convex CCW polygon."""


class DegenerateSplit(StitsimError):
    """A split produced a sliver piece below the area floor; caller should resample."""


class ContainmentViolation(StitsimError):
    """A probe or sub-window is not contained in the reference window."""


class ReplicateAborted(StitsimError):
    """A simulation replicate could not be completed (resampling exhausted or event cap hit)."""


class InsufficientSamples(StitsimError):
    """A statistical test was given fewer samples than it supports."""


class ConfigError(StitsimError):
    """Experiment configuration failed validation."""
