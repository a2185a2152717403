"""Spectral and temporal filtering at the quantum receiver.

A receiver chain is an ordered set of spectral filters plus one temporal
gate. The chain's net spectral width is set by its narrowest filter, and
the product of net width and gate window is audited against the minimum
time-bandwidth product for transform-limited Gaussian pulses, 2*ln(2)/pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError
from .linkmodel import ItuChannel, SPEED_OF_LIGHT_NM_THZ, linear_to_db

# Minimum time-bandwidth product (FWHM in frequency times FWHM in time)
# for a transform-limited Gaussian pulse.
TBP_LIMIT = 2.0 * math.log(2.0) / math.pi


def time_bandwidth_product(fwhm_ghz: float, window_ps: float) -> float:
    """Dimensionless product of spectral width (GHz) and time window (ps)."""
    if fwhm_ghz <= 0.0 or window_ps <= 0.0:
        raise ParameterError("bandwidth and window must be positive")
    return fwhm_ghz * window_ps * 1.0e-3


def ideal_fwhm_ghz(window_ps: float) -> float:
    """Spectral FWHM in GHz that saturates the time-bandwidth limit at ``window_ps``."""
    if window_ps <= 0.0:
        raise ParameterError(f"window must be positive, got {window_ps}")
    return TBP_LIMIT * 1.0e3 / window_ps


@dataclass(frozen=True)
class SpectralFilter:
    """One spectral filter: center channel, FWHM in GHz, insertion loss in dB."""

    center: ItuChannel
    fwhm_ghz: float
    insertion_db: float = 0.0

    def __post_init__(self) -> None:
        if self.fwhm_ghz <= 0.0:
            raise ParameterError(f"filter FWHM must be positive, got {self.fwhm_ghz}")
        if self.insertion_db < 0.0:
            raise ParameterError(
                f"insertion loss must be non-negative, got {self.insertion_db}"
            )

    @property
    def equivalent_bandwidth_nm(self) -> float:
        """FWHM converted to a wavelength width at the filter center, in nm."""
        wl = self.center.wavelength_nm
        return (self.fwhm_ghz * 1.0e-3) * wl * wl / SPEED_OF_LIGHT_NM_THZ


@dataclass(frozen=True)
class TemporalGate:
    """Detection gate: acceptance window in ps, gate repetition rate in GHz."""

    window_ps: float
    clock_ghz: float

    def __post_init__(self) -> None:
        if self.window_ps <= 0.0:
            raise ParameterError(f"gate window must be positive, got {self.window_ps}")
        if self.clock_ghz <= 0.0:
            raise ParameterError(f"clock rate must be positive, got {self.clock_ghz}")
        if self.acceptance > 1.0:
            raise ParameterError(
                f"gate window {self.window_ps} ps exceeds the clock period "
                f"{1.0e3 / self.clock_ghz} ps"
            )

    @property
    def acceptance(self) -> float:
        # window_ps * clock_ghz * 1e-3 is the open fraction of each clock period.
        return self.window_ps * self.clock_ghz * 1.0e-3

    @property
    def acceptance_db(self) -> float:
        return linear_to_db(self.acceptance)

    @property
    def clock_hz(self) -> float:
        return self.clock_ghz * 1.0e9


def temporal_acceptance(gate: TemporalGate) -> float:
    """Fraction of continuous-wave background that falls inside the gate."""
    return gate.acceptance


def temporal_acceptance_db(gate: TemporalGate) -> float:
    """Gate acceptance expressed in dB (negative for any window below the period)."""
    return linear_to_db(gate.acceptance)


@dataclass(frozen=True)
class TbpAudit:
    """Outcome of checking a chain against the time-bandwidth limit."""

    tbp: float
    limit: float
    ratio: float
    at_limit: bool


@dataclass(frozen=True)
class FilterChain:
    """Receiver filter stack plus temporal gate.

    The narrowest filter sets the net spectral acceptance; insertion losses
    add in dB across all filters.
    """

    filters: tuple[SpectralFilter, ...]
    gate: TemporalGate

    def __post_init__(self) -> None:
        if not self.filters:
            raise ParameterError("a filter chain needs at least one spectral filter")

    @property
    def narrowest(self) -> SpectralFilter:
        return min(self.filters, key=lambda f: f.fwhm_ghz)

    @property
    def net_fwhm_ghz(self) -> float:
        return self.narrowest.fwhm_ghz

    @property
    def net_bandwidth_nm(self) -> float:
        """In-band width seen by broadband noise, in nm."""
        return self.narrowest.equivalent_bandwidth_nm

    @property
    def insertion_db(self) -> float:
        return sum(f.insertion_db for f in self.filters)

    @property
    def tbp(self) -> float:
        return time_bandwidth_product(self.net_fwhm_ghz, self.gate.window_ps)

    def with_ideal_spectral_width(self) -> "FilterChain":
        """Chain with the narrowest filter squeezed to the time-bandwidth limit.

        Insertion losses are kept as they are: the projection changes only
        how much broadband noise is accepted, not the signal path.
        """
        target = ideal_fwhm_ghz(self.gate.window_ps)
        replaced = False
        new_filters = []
        for f in self.filters:
            if not replaced and f is self.narrowest:
                new_filters.append(
                    SpectralFilter(center=f.center, fwhm_ghz=target, insertion_db=f.insertion_db)
                )
                replaced = True
            else:
                new_filters.append(f)
        return FilterChain(filters=tuple(new_filters), gate=self.gate)


def tbp_audit(chain: FilterChain) -> TbpAudit:
    """Compare a chain's time-bandwidth product against the Gaussian limit."""
    tbp = chain.tbp
    ratio = tbp / TBP_LIMIT
    return TbpAudit(tbp=tbp, limit=TBP_LIMIT, ratio=ratio, at_limit=ratio <= 1.0 + 1.0e-12)


def spectral_rejection_db(chain: FilterChain, reference_fwhm_ghz: float) -> float:
    """Broadband noise reduction of the chain relative to a reference bandwidth.

    Positive when the chain is narrower than the reference.
    """
    if reference_fwhm_ghz <= 0.0:
        raise ParameterError(
            f"reference bandwidth must be positive, got {reference_fwhm_ghz}"
        )
    return linear_to_db(reference_fwhm_ghz / chain.net_fwhm_ghz)
