"""Fitting free model parameters against measured anchor points.

The fit runs in log-parameter space because both the Raman scale and the
rates span decades, and minimizes a weighted sum of squared log residuals
with a derivative-free simplex search restarted from five deterministic
starting points. Failure to converge is reported, not raised; a model that
cannot produce key at an anchor under any probed parameters is an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import CalibrationError, ParameterError
from .scenario import Scenario

FREE_PARAMETERS = ("raman_scale", "e_det", "dark_rate_hz")
_METRICS = ("secure_bps", "sifted_bps", "qber_z")
_DEAD_RESIDUAL = 50.0  # log residual standing in for a zero-rate model point
_RESTARTS = 5


@dataclass(frozen=True)
class Anchor:
    """One measured point the fit must reproduce."""

    scenario: Scenario
    axis_value: float
    target: float
    metric: str = "secure_bps"
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.metric not in _METRICS:
            raise ParameterError(f"unknown anchor metric {self.metric!r}")
        if self.target <= 0.0:
            raise ParameterError(f"anchor target must be positive, got {self.target}")
        if self.weight <= 0.0:
            raise ParameterError(f"anchor weight must be positive, got {self.weight}")


@dataclass(frozen=True)
class CalibrationResult:
    """Fitted parameters with per-anchor closure diagnostics."""

    params: tuple[tuple[str, float], ...]
    residuals: tuple[float, ...]
    converged: bool
    objective: float
    iterations: int

    def as_dict(self) -> dict[str, float]:
        return dict(self.params)

    def __getitem__(self, name: str) -> float:
        return self.as_dict()[name]


def apply_params(scenario: Scenario, params: Mapping[str, float]) -> Scenario:
    """Return the scenario with the given free parameters substituted."""
    out = scenario
    for name, value in params.items():
        if name == "raman_scale":
            out = out.with_raman_scale(value)
        elif name == "e_det":
            out = out.with_protocol(e_det=value)
        elif name == "dark_rate_hz":
            out = out.with_detector(dark_rate_hz=value)
        else:
            raise ParameterError(
                f"unknown calibration parameter {name!r}; "
                f"supported: {', '.join(FREE_PARAMETERS)}"
            )
    return out


def _current_value(scenario: Scenario, name: str) -> float:
    if name == "raman_scale":
        return scenario.raman.scale
    if name == "e_det":
        return scenario.protocol.e_det
    if name == "dark_rate_hz":
        return scenario.detector.dark_rate_hz
    raise ParameterError(f"unknown calibration parameter {name!r}")


def _metric_of(row, metric: str) -> float:
    return float(getattr(row, metric))


def anchors_from_spec(scenario: Scenario) -> tuple[Anchor, ...]:
    """Build anchors from the scenario's declared calibration block."""
    if scenario.calibration is None or not scenario.calibration.anchors:
        raise ParameterError(
            f"scenario {scenario.name!r} declares no calibration anchors"
        )
    return tuple(
        Anchor(
            scenario=scenario,
            axis_value=spec.axis_value,
            target=spec.target,
            metric=spec.metric,
            weight=spec.weight,
        )
        for spec in scenario.calibration.anchors
    )


def _residuals(anchors: Sequence[Anchor], params: Mapping[str, float]) -> list[float]:
    from .sweep import evaluate_point

    out = []
    for anchor in anchors:
        point = apply_params(anchor.scenario, params)
        row = evaluate_point(point, anchor.axis_value)
        model = _metric_of(row, anchor.metric)
        if model <= 0.0:
            out.append(_DEAD_RESIDUAL)
        else:
            out.append(math.log(model) - math.log(anchor.target))
    return out


def calibrate(
    anchors: Sequence[Anchor],
    free: Sequence[str] = ("raman_scale", "e_det"),
    max_iterations: int = 600,
) -> CalibrationResult:
    """Fit the free parameters to the anchors.

    Raises CalibrationError when the best fit still leaves an anchor with no
    key at all (the model cannot reach the data). A fit that merely fails
    the convergence tolerances comes back with ``converged`` False.
    """
    free = tuple(free)
    if not 1 <= len(free) <= len(FREE_PARAMETERS):
        raise ParameterError(
            f"between 1 and {len(FREE_PARAMETERS)} free parameters, got {len(free)}"
        )
    for name in free:
        if name not in FREE_PARAMETERS:
            raise ParameterError(
                f"unknown calibration parameter {name!r}; "
                f"supported: {', '.join(FREE_PARAMETERS)}"
            )
    if len(set(free)) != len(free):
        raise ParameterError("free parameters must be distinct")
    if len(anchors) < len(free):
        raise ParameterError(
            f"{len(free)} free parameters need at least that many anchors, "
            f"got {len(anchors)}"
        )

    weights = np.array([a.weight for a in anchors])
    x0 = np.log([_current_value(anchors[0].scenario, name) for name in free])

    def objective(x: np.ndarray) -> float:
        params = {name: math.exp(v) for name, v in zip(free, x)}
        if params.get("e_det", 0.0) > 0.5:
            return 1.0e9 * params["e_det"]
        r = np.array(_residuals(anchors, params))
        return float(np.sum(weights * r * r))

    # Deterministic restart offsets in log space: the origin plus four
    # fixed scalings, enough to escape a bad local basin without a grid.
    rng = np.random.default_rng(20160406)
    offsets = [np.zeros(len(free))]
    offsets.extend(rng.uniform(-math.log(4.0), math.log(4.0), size=len(free))
                   for _ in range(_RESTARTS - 1))

    best = None
    iterations = 0
    for offset in offsets:
        res = minimize(
            objective,
            x0 + offset,
            method="Nelder-Mead",
            options={
                "maxiter": max_iterations,
                "xatol": 1.0e-7,
                "fatol": 1.0e-12,
            },
        )
        iterations += int(res.nit)
        if best is None or res.fun < best.fun:
            best = res

    assert best is not None
    fitted = {name: math.exp(v) for name, v in zip(free, best.x)}
    log_residuals = _residuals(anchors, fitted)
    if any(r >= _DEAD_RESIDUAL for r in log_residuals):
        raise CalibrationError(
            "no key rate at one or more anchors at the best-fit parameters; "
            "the anchors are not reachable by this model"
        )
    relative = tuple(math.expm1(r) for r in log_residuals)
    return CalibrationResult(
        params=tuple(fitted.items()),
        residuals=relative,
        converged=bool(best.success),
        objective=float(best.fun),
        iterations=iterations,
    )
