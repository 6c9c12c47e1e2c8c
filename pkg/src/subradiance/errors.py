"""Exception types shared across the package."""


class SubradianceError(Exception):
    """Base class for package-specific failures."""


class UnsupportedConfigurationError(SubradianceError):
    """A physically valid configuration the requested code path cannot handle
    (e.g. heterogeneous couplings on the closed-form path)."""


class GridError(SubradianceError):
    """The time/frequency grid cannot resolve the requested propagation."""


class ConfigError(SubradianceError):
    """Invalid run configuration (unknown keys, missing parameters)."""
