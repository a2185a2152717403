"""Receiver-sensitivity model for 10 Gb/s on-off-keyed data channels.

A thermal-noise-limited OOK receiver at BER 1e-12 needs a Q factor of
about 7; the model anchors that Q to the quoted sensitivity and scales it
linearly with received optical power. That is the usual back-of-envelope
for a PIN/TIA front end and is all the planner needs: given a link loss,
at what launch power does the channel run error free, and how much lower
can we push the launch to tame the Raman noise it creates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erfc, erfcinv

from .errors import ParameterError
from .linkmodel import LinkBudget, db_to_linear

# Guard against loss bookkeeping that lands a hair above the sensitivity
# due to float rounding; a millionth of a dB is far below any real margin.
_SLACK_DB = 1.0e-9


def q_factor_for_ber(ber: float) -> float:
    """Q factor at which an OOK receiver reaches the given BER.

    BER = 0.5 * erfc(Q / sqrt(2)), inverted.
    """
    if not 0.0 < ber < 0.5:
        raise ParameterError(f"BER must be in (0, 0.5), got {ber}")
    return math.sqrt(2.0) * erfcinv(2.0 * ber)


def ber_for_q_factor(q: float) -> float:
    """BER of an OOK receiver running at the given Q factor."""
    if q < 0.0:
        raise ParameterError(f"Q factor must be non-negative, got {q}")
    return 0.5 * erfc(q / math.sqrt(2.0))


@dataclass(frozen=True)
class TransceiverSpec:
    """A 10 Gb/s data transceiver.

    Attributes:
        bitrate_gbps: line rate per channel.
        sensitivity_dbm: received power at which the BER threshold is met.
        max_launch_dbm: transmitter output ceiling.
        ber_threshold: target bit error rate defining the sensitivity.
    """

    bitrate_gbps: float = 10.0
    sensitivity_dbm: float = -27.0
    max_launch_dbm: float = 5.0
    ber_threshold: float = 1.0e-12

    def __post_init__(self) -> None:
        if self.bitrate_gbps <= 0.0:
            raise ParameterError(f"bitrate must be positive, got {self.bitrate_gbps}")
        if not 0.0 < self.ber_threshold < 0.5:
            raise ParameterError(
                f"BER threshold must be in (0, 0.5), got {self.ber_threshold}"
            )
        if self.max_launch_dbm < self.sensitivity_dbm:
            raise ParameterError(
                f"max launch {self.max_launch_dbm} dBm is below the sensitivity "
                f"{self.sensitivity_dbm} dBm"
            )

    @property
    def q_reference(self) -> float:
        """Q factor at exactly the sensitivity point."""
        return q_factor_for_ber(self.ber_threshold)


def received_power_dbm(launch_dbm: float, loss_db: float) -> float:
    """Launch power minus total path loss."""
    if loss_db < 0.0:
        raise ParameterError(f"path loss must be non-negative, got {loss_db}")
    return launch_dbm - loss_db


def ber_at_power(received_dbm: float, trx: TransceiverSpec) -> float:
    """BER at a given received power.

    Thermal-noise-limited scaling: Q is proportional to received optical
    power, pinned to q_reference at the sensitivity.
    """
    q = trx.q_reference * db_to_linear(received_dbm - trx.sensitivity_dbm)
    return ber_for_q_factor(q)


def error_free(received_dbm: float, trx: TransceiverSpec) -> bool:
    """True when the received power meets the sensitivity.

    Power at or above the sensitivity (within a micro-dB float guard)
    keeps the channel at or below its BER threshold.
    """
    return received_dbm >= trx.sensitivity_dbm - _SLACK_DB


def adapted_launch_dbm(link: LinkBudget, trx: TransceiverSpec, margin_db: float = 0.0) -> float:
    """Lowest launch power that still closes the link, plus margin.

    Raman scattering scales with what goes into the fiber, so data lasers
    are run as cold as the sensitivity allows.
    """
    if margin_db < 0.0:
        raise ParameterError(f"margin must be non-negative, got {margin_db}")
    launch = trx.sensitivity_dbm + link.total_db + margin_db
    if launch > trx.max_launch_dbm + _SLACK_DB:
        raise ParameterError(
            f"link loss {link.total_db:.2f} dB needs {launch:.2f} dBm, above the "
            f"transmitter ceiling {trx.max_launch_dbm:.2f} dBm"
        )
    return launch
