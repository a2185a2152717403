"""Spontaneous Raman scattering noise from classical lasers sharing the fiber.

Each classical channel pumps a broadband noise floor; the part falling
inside the quantum receiver's passband is what matters. For a pump launched
with power P0 into a fiber with linear attenuation a (1/km), scattering
coefficient rho (1/(km*nm)) and receiver bandwidth dl (nm):

  co-propagating pump:      P_f(L) = P0 * exp(-a*L) * rho * dl * L
  counter-propagating pump: P_b(L) = P0 * rho * dl * (1 - exp(-2*a*L)) / (2*a)

Both follow from dP/dz = -a*P + rho*dl*P_pump(z) with the pump decaying
along its own direction of travel. The scattering coefficient is a scale
factor times a tabulated spectral shape g(detuning); the scale is a
calibration product and has no default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import ParameterError
from .linkmodel import (
    FiberSpec,
    ItuChannel,
    channel_detuning_nm,
    db_to_linear,
)

if TYPE_CHECKING:  # only for annotations; runtime stays import-cycle free
    from .planner import ChannelAssignment

# Default spectral shape: a dip of relative strength 0.5 within 4 nm of the
# pump, recovering linearly to the far plateau (1.0) by 10 nm detuning.
DEFAULT_SHAPE_KNOTS: tuple[tuple[float, float], ...] = (
    (-10.0, 1.0),
    (-4.0, 0.5),
    (4.0, 0.5),
    (10.0, 1.0),
)


@dataclass(frozen=True)
class RamanProfile:
    """Scattering coefficient model: rho(detuning) = scale * g(detuning).

    Attributes:
        scale: overall coefficient in 1/(km*nm); a calibration output,
            required explicitly.
        detunings_nm: knot positions of the shape table, ascending.
        shape: relative strength at each knot, non-negative.

    Between knots the shape is piecewise linear; outside the table it holds
    the edge value.
    """

    scale: float
    detunings_nm: tuple[float, ...]
    shape: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.scale <= 0.0:
            raise ParameterError(f"scattering scale must be positive, got {self.scale}")
        if len(self.detunings_nm) != len(self.shape) or len(self.shape) < 2:
            raise ParameterError("shape table needs at least two (detuning, strength) rows")
        d = np.asarray(self.detunings_nm, dtype=float)
        if np.any(np.diff(d) <= 0.0):
            raise ParameterError("shape table detunings must be strictly ascending")
        if any(s < 0.0 for s in self.shape):
            raise ParameterError("shape values must be non-negative")

    @classmethod
    def with_default_shape(cls, scale: float) -> "RamanProfile":
        knots = DEFAULT_SHAPE_KNOTS
        return cls(
            scale=scale,
            detunings_nm=tuple(k[0] for k in knots),
            shape=tuple(k[1] for k in knots),
        )

    @classmethod
    def from_rows(cls, scale: float, rows: Iterable[Sequence[float]]) -> "RamanProfile":
        pairs = [(float(r[0]), float(r[1])) for r in rows]
        if not pairs:
            raise ParameterError("shape table is empty")
        pairs.sort(key=lambda p: p[0])
        return cls(
            scale=scale,
            detunings_nm=tuple(p[0] for p in pairs),
            shape=tuple(p[1] for p in pairs),
        )

    @classmethod
    def from_table(cls, scale: float, path: str | Path) -> "RamanProfile":
        """Load a two-column table (detuning_nm, relative strength).

        Lines starting with '#' are comments; columns are whitespace separated.
        """
        try:
            data = np.loadtxt(path, dtype=float, comments="#", ndmin=2)
        except (OSError, ValueError) as exc:
            raise ParameterError(f"cannot read shape table {path}: {exc}") from exc
        if data.shape[1] != 2:
            raise ParameterError(
                f"shape table {path} must have exactly two columns, got {data.shape[1]}"
            )
        return cls.from_rows(scale, data.tolist())

    def g(self, detuning_nm: float) -> float:
        """Relative spectral strength at a signed detuning in nm."""
        return float(np.interp(detuning_nm, self.detunings_nm, self.shape))

    def rho(self, detuning_nm: float) -> float:
        """Scattering coefficient in 1/(km*nm) at a signed detuning."""
        return self.scale * self.g(detuning_nm)


def forward_raman_power(
    launch_w: float, fiber: FiberSpec, rho_per_km_nm: float, bandwidth_nm: float
) -> float:
    """In-band noise power at the fiber output from a co-propagating pump."""
    _check_noise_args(launch_w, rho_per_km_nm, bandwidth_nm)
    a = fiber.attenuation_per_km
    length = fiber.length_km
    return launch_w * math.exp(-a * length) * rho_per_km_nm * bandwidth_nm * length


def backward_raman_power(
    launch_w: float, fiber: FiberSpec, rho_per_km_nm: float, bandwidth_nm: float
) -> float:
    """In-band noise power at the fiber output from a counter-propagating pump.

    Uses expm1 so the small-attenuation limit degrades gracefully to
    launch * rho * bandwidth * length.
    """
    _check_noise_args(launch_w, rho_per_km_nm, bandwidth_nm)
    a = fiber.attenuation_per_km
    length = fiber.length_km
    effective_km = -math.expm1(-2.0 * a * length) / (2.0 * a)
    return launch_w * rho_per_km_nm * bandwidth_nm * effective_km


def _check_noise_args(launch_w: float, rho: float, bandwidth_nm: float) -> None:
    if launch_w < 0.0:
        raise ParameterError(f"launch power must be non-negative, got {launch_w}")
    if rho < 0.0:
        raise ParameterError(f"scattering coefficient must be non-negative, got {rho}")
    if bandwidth_nm <= 0.0:
        raise ParameterError(f"bandwidth must be positive, got {bandwidth_nm}")


def crosstalk_leakage(launch_w: float, isolation_db: float) -> float:
    """Classical power leaking through a port with the given isolation."""
    if launch_w < 0.0:
        raise ParameterError(f"launch power must be non-negative, got {launch_w}")
    if isolation_db < 0.0:
        raise ParameterError(f"isolation must be non-negative, got {isolation_db}")
    return launch_w * db_to_linear(-isolation_db)


@dataclass(frozen=True)
class IsolationModel:
    """Worst-case mux/demux isolation into the quantum port, by spacing."""

    adjacent_db: float = 43.0
    non_adjacent_db: float = 77.0
    # Out-of-band leakage is additionally suppressed by the stopband of any
    # narrowband filter in front of the detector.
    filter_stopband_db: float = 30.0

    def isolation_db(self, index_separation: int) -> float:
        if index_separation == 0:
            raise ParameterError("a classical channel cannot share the quantum slot")
        return self.adjacent_db if abs(index_separation) == 1 else self.non_adjacent_db


DEFAULT_ISOLATION = IsolationModel()


@dataclass(frozen=True)
class RamanContribution:
    """Per-source breakdown of noise delivered into the quantum passband."""

    channel_index: int
    role: str
    direction: str
    launch_w: float
    in_band_w: float
    crosstalk_w: float

    @property
    def total_w(self) -> float:
        return self.in_band_w + self.crosstalk_w


@dataclass(frozen=True)
class AggregateNoise:
    """Total classical noise at the fiber output, inside the receiver passband."""

    total_w: float
    contributions: tuple[RamanContribution, ...]


def aggregate_noise(
    sources: Iterable["ChannelAssignment"],
    quantum: ItuChannel,
    fiber: FiberSpec,
    profile: RamanProfile,
    bandwidth_nm: float,
    isolation: IsolationModel = DEFAULT_ISOLATION,
) -> AggregateNoise:
    """Sum scattering and crosstalk noise over all powered classical channels.

    Sources without a launch power are skipped. Scattered noise is evaluated
    inside ``bandwidth_nm`` at the quantum wavelength; crosstalk is the launch
    power behind the worst-case port isolation plus the narrowband stopband,
    treated as if it reached the detector in band (a pessimistic stance, since
    the leaked carrier is well outside the passband).

    Raises:
        ParameterError: If a powered source sits on the quantum channel.
    """
    contributions: list[RamanContribution] = []
    for src in sources:
        if src.launch_dbm is None:
            continue
        if src.channel.index == quantum.index:
            raise ParameterError(
                f"channel {src.channel.index} collides with the quantum channel"
            )
        launch_w = src.launch_w
        rho = profile.rho(channel_detuning_nm(src.channel, quantum))
        if src.direction == "counter":
            in_band = backward_raman_power(launch_w, fiber, rho, bandwidth_nm)
        else:
            in_band = forward_raman_power(launch_w, fiber, rho, bandwidth_nm)
        iso = isolation.isolation_db(src.channel.index - quantum.index)
        crosstalk = crosstalk_leakage(launch_w, iso + isolation.filter_stopband_db)
        contributions.append(
            RamanContribution(
                channel_index=src.channel.index,
                role=src.role,
                direction=src.direction,
                launch_w=launch_w,
                in_band_w=in_band,
                crosstalk_w=crosstalk,
            )
        )
    total = sum(c.total_w for c in contributions)
    return AggregateNoise(total_w=total, contributions=tuple(contributions))
