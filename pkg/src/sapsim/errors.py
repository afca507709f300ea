"""Exception types shared across the package.

CLI exit codes map onto these: ConfigError -> 2, IntegrationError -> 3,
CalibrationError -> 4.
"""

from __future__ import annotations


class SapsimError(Exception):
    """Base class for all package errors."""


class GeometryError(SapsimError):
    """Invalid waveguide layout (crossings, overlaps, bad parameters)."""


class ConfigError(SapsimError):
    """Invalid or unknown configuration content; message names the key path."""


class IntegrationError(SapsimError):
    """The ODE integrator failed (step-size underflow, divergence)."""


class CalibrationError(SapsimError):
    """Closed-loop calibration found no admissible point.

    Carries the scanned grid and the crosstalk values as a diagnostic curve.
    """

    def __init__(self, message, kappa_grid=None, crosstalk_db=None):
        super().__init__(message)
        self.kappa_grid = kappa_grid
        self.crosstalk_db = crosstalk_db
