"""Units, channel grid, and loss bookkeeping for a mixed quantum/classical fiber link.

Power moves between dBm and watts, channel positions live on a fixed
100 GHz grid anchored at 190.0 THz, and attenuation is tracked as an
itemized budget of distributed fiber loss plus discrete component losses.
All conversions are pure functions so they can be property-tested for
exact round-trips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

# Speed of light expressed in nm*THz; converts wavelength in nm to
# frequency in THz and back without unit shuffling.
SPEED_OF_LIGHT_NM_THZ = 299792.458

# Speed of light in m/s, used for photon energy.
SPEED_OF_LIGHT_M_S = 299792458.0

# Planck constant in J*s (exact SI value).
PLANCK_J_S = 6.62607015e-34

# 100 GHz grid: frequency = GRID_BASE_THZ + index * GRID_SPACING_THZ.
GRID_BASE_THZ = 190.0
GRID_SPACING_THZ = 0.1

# Supported grid index range; covers the C band on the 100 GHz grid.
GRID_INDEX_MIN = 1
GRID_INDEX_MAX = 72


def db_to_linear(value_db: float) -> float:
    """Convert a dB quantity to a linear power ratio."""
    return 10.0 ** (value_db / 10.0)


def linear_to_db(ratio: float) -> float:
    """Convert a linear power ratio to dB.

    Args:
        ratio: Power ratio, strictly positive.

    Raises:
        ParameterError: If ``ratio`` is not positive.
    """
    if ratio <= 0.0:
        raise ParameterError(f"power ratio must be positive, got {ratio}")
    return 10.0 * math.log10(ratio)


def dbm_to_watts(power_dbm: float) -> float:
    """Convert power in dBm to watts."""
    return 1.0e-3 * 10.0 ** (power_dbm / 10.0)


def watts_to_dbm(power_w: float) -> float:
    """Convert power in watts to dBm.

    Args:
        power_w: Power in watts, strictly positive.

    Raises:
        ParameterError: If ``power_w`` is not positive.
    """
    if power_w <= 0.0:
        raise ParameterError(f"power must be positive, got {power_w} W")
    return 10.0 * math.log10(power_w / 1.0e-3)


@dataclass(frozen=True)
class ItuChannel:
    """A position on the 100 GHz grid.

    Attributes:
        index: Grid index; frequency is 190.0 THz + index * 100 GHz.
    """

    index: int

    def __post_init__(self) -> None:
        if not isinstance(self.index, int) or isinstance(self.index, bool):
            raise ParameterError(f"grid index must be an integer, got {self.index!r}")
        if not GRID_INDEX_MIN <= self.index <= GRID_INDEX_MAX:
            raise ParameterError(
                f"grid index {self.index} outside supported range "
                f"[{GRID_INDEX_MIN}, {GRID_INDEX_MAX}]"
            )

    @property
    def frequency_thz(self) -> float:
        """Center frequency in THz."""
        return GRID_BASE_THZ + self.index * GRID_SPACING_THZ

    @property
    def wavelength_nm(self) -> float:
        """Center wavelength in nm."""
        return SPEED_OF_LIGHT_NM_THZ / self.frequency_thz


def channel_detuning_nm(channel: ItuChannel, reference: ItuChannel) -> float:
    """Signed wavelength offset of ``channel`` relative to ``reference`` in nm."""
    return channel.wavelength_nm - reference.wavelength_nm


@dataclass(frozen=True)
class FiberSpec:
    """Uniform fiber span.

    Attributes:
        length_km: Span length in km, non-negative (0 models a patch cord).
        attenuation_db_per_km: Attenuation in dB/km, strictly positive.
    """

    length_km: float
    attenuation_db_per_km: float = 0.2

    def __post_init__(self) -> None:
        if self.length_km < 0.0:
            raise ParameterError(f"fiber length must be non-negative, got {self.length_km}")
        if self.attenuation_db_per_km <= 0.0:
            raise ParameterError(
                f"attenuation must be positive, got {self.attenuation_db_per_km}"
            )

    @property
    def loss_db(self) -> float:
        """End-to-end fiber loss in dB."""
        return self.length_km * self.attenuation_db_per_km

    @property
    def attenuation_per_km(self) -> float:
        """Attenuation as a linear coefficient in 1/km (natural log base)."""
        return self.attenuation_db_per_km * math.log(10.0) / 10.0


@dataclass(frozen=True)
class ComponentLoss:
    """A discrete lumped loss, e.g. one mux or demux traversal."""

    label: str
    loss_db: float

    def __post_init__(self) -> None:
        if self.loss_db < 0.0:
            raise ParameterError(
                f"component loss must be non-negative, got {self.loss_db} ({self.label})"
            )


@dataclass(frozen=True)
class LinkBudget:
    """Itemized attenuation budget for one channel through the link."""

    fiber: FiberSpec
    components: tuple[ComponentLoss, ...] = ()

    @property
    def component_db(self) -> float:
        """Sum of all discrete component losses in dB."""
        return sum(c.loss_db for c in self.components)

    @property
    def total_db(self) -> float:
        """Total loss in dB: fiber plus components."""
        return self.fiber.loss_db + self.component_db

    @property
    def transmittance(self) -> float:
        """Total loss as a linear power transmission factor."""
        return db_to_linear(-self.total_db)


def total_link_loss(fiber: FiberSpec, components: tuple[ComponentLoss, ...] | list[ComponentLoss] = ()) -> LinkBudget:
    """Assemble an itemized link budget from a fiber span and lumped losses."""
    return LinkBudget(fiber=fiber, components=tuple(components))


def photon_energy_j(wavelength_nm: float) -> float:
    """Energy of one photon at the given wavelength, in joules."""
    if wavelength_nm <= 0.0:
        raise ParameterError(f"wavelength must be positive, got {wavelength_nm}")
    return PLANCK_J_S * SPEED_OF_LIGHT_M_S / (wavelength_nm * 1.0e-9)


def photon_flux_per_s(power_w: float, wavelength_nm: float) -> float:
    """Photon arrival rate in 1/s for a given optical power and wavelength."""
    if power_w < 0.0:
        raise ParameterError(f"power must be non-negative, got {power_w}")
    return power_w / photon_energy_j(wavelength_nm)
