"""Gated single-photon detector model.

Click probabilities are per gate. Continuous background light is converted
to a per-gate probability through the photon flux, the detector efficiency,
and the open fraction of the temporal gate; dark counts add on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ParameterError
from .filterchain import TemporalGate
from .linkmodel import photon_flux_per_s

# Per-gate noise probability above which a gated detector starts to
# saturate in practice (dead time, afterpulse pile-up).
GATE_OCCUPANCY_WARN = 0.1


@dataclass(frozen=True)
class DetectorSpec:
    """Gated detector parameters.

    :param efficiency: detection efficiency in (0, 1].
    :param dark_rate_hz: dark count rate in counts/s.
    :param afterpulse: afterpulse probability per detection event.
    :param gate: temporal gate (window and clock).
    """

    efficiency: float = 0.20
    dark_rate_hz: float = 1.0e3
    afterpulse: float = 0.04
    gate: TemporalGate = field(default_factory=lambda: TemporalGate(window_ps=100.0, clock_ghz=1.0))

    def __post_init__(self) -> None:
        if not 0.0 < self.efficiency <= 1.0:
            raise ParameterError(f"efficiency must be in (0, 1], got {self.efficiency}")
        if self.dark_rate_hz < 0.0:
            raise ParameterError(f"dark rate must be non-negative, got {self.dark_rate_hz}")
        if self.afterpulse < 0.0:
            raise ParameterError(f"afterpulse must be non-negative, got {self.afterpulse}")


@dataclass(frozen=True)
class ClickRates:
    """Per-gate click probabilities split by origin, plus the afterpulse factor."""

    signal_per_gate: float
    noise_per_gate: float
    dark_per_gate: float
    afterpulse_factor: float = 1.0

    def __post_init__(self) -> None:
        for label in ("signal_per_gate", "noise_per_gate", "dark_per_gate"):
            value = getattr(self, label)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{label} must be in [0, 1], got {value}")
        if self.afterpulse_factor < 1.0:
            raise ParameterError(
                f"afterpulse factor must be >= 1, got {self.afterpulse_factor}"
            )
        total = (
            self.signal_per_gate + self.noise_per_gate + self.dark_per_gate
        ) * self.afterpulse_factor
        if total > 1.0:
            raise ParameterError(
                f"total per-gate click probability exceeds 1: {total}"
            )

    @property
    def total_per_gate(self) -> float:
        return (
            self.signal_per_gate + self.noise_per_gate + self.dark_per_gate
        ) * self.afterpulse_factor

    def as_mapping(self) -> dict[str, float]:
        """Per-category rates with the afterpulse factor applied, for sampling."""
        return {
            "signal": self.signal_per_gate * self.afterpulse_factor,
            "noise": self.noise_per_gate * self.afterpulse_factor,
            "dark": self.dark_per_gate * self.afterpulse_factor,
        }


def click_probability(mean_photons: float, det: DetectorSpec) -> float:
    """Per-gate click probability for a pulse with the given mean photon number.

    The Poissonian no-click term gives 1 - exp(-eta * mu); afterpulsing
    multiplies the click rate by (1 + p_a). The result is clamped to 1.
    """
    if mean_photons < 0.0:
        raise ParameterError(f"mean photon number must be non-negative, got {mean_photons}")
    p = -math.expm1(-det.efficiency * mean_photons)
    p *= 1.0 + det.afterpulse
    return min(p, 1.0)


def noise_click_probability(power_w: float, wavelength_nm: float, det: DetectorSpec) -> float:
    """Per-gate click probability from continuous in-band noise plus dark counts.

    :param power_w: noise power reaching the detector, in watts.
    :param wavelength_nm: noise wavelength, for the photon energy.
    """
    if power_w < 0.0:
        raise ParameterError(f"noise power must be non-negative, got {power_w}")
    flux = photon_flux_per_s(power_w, wavelength_nm)
    per_gate = det.efficiency * (flux / det.gate.clock_hz) * det.gate.acceptance
    per_gate += det.dark_rate_hz / det.gate.clock_hz
    return min(per_gate, 1.0)


def is_saturating(per_gate_probability: float) -> bool:
    """True when a per-gate noise probability is high enough to distort counting."""
    return per_gate_probability > GATE_OCCUPANCY_WARN


def sample_counts(rates: Mapping[str, float], gates: int, seed: int) -> dict[str, int]:
    """Draw Poisson counts for a set of per-gate probabilities.

    Deterministic for a fixed seed; keys are processed in sorted order so the
    stream assignment does not depend on mapping order.

    :param rates: per-gate probabilities keyed by label.
    :param gates: number of gates in the counting interval.
    :param seed: RNG seed.
    """
    if gates < 0:
        raise ParameterError(f"gate count must be non-negative, got {gates}")
    for label, rate in rates.items():
        if rate < 0.0:
            raise ParameterError(f"rate for {label!r} must be non-negative, got {rate}")
    rng = np.random.default_rng(seed)
    return {label: int(rng.poisson(rates[label] * gates)) for label in sorted(rates)}
