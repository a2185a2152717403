"""Exception types shared across the package."""


class ParameterError(ValueError):
    """An input value violates a documented precondition."""


class ScenarioError(ParameterError):
    """A scenario file is malformed, has unknown keys, or fails validation."""


class PlanError(ParameterError):
    """A channel plan is inconsistent or cannot be provisioned."""


class CalibrationError(RuntimeError):
    """Calibration could not reach a usable parameter set."""
