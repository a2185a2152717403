"""Decoy-state BB84 key rate with a simple finite-size treatment.

The channel model is the standard one for a phase-randomized weak coherent
source into a threshold detector: an n-photon pulse is detected with yield
Y_n = 1 - (1 - Y0) * (1 - eta)^n, background clicks are random (error 1/2),
and detected signal photons err with a fixed probability e_det. Single
photon quantities are bounded from the three measured intensities with the
usual two-decoy linear-programming bounds.

Finite statistics are handled by shifting every measured gain and error
rate adversarially by a Hoeffding deviation before the bounds are formed,
plus a fixed secrecy/correctness debit on the final rate. This is a
deliberately plain treatment: it converges to the asymptotic rate as the
session grows and never flatters the key rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .detection import DetectorSpec, noise_click_probability
from .errors import ParameterError
from .filterchain import FilterChain
from .linkmodel import LinkBudget, db_to_linear

# The total failure budget is split into eight equal shares: one per
# estimated observable (three gains, three error rates), one for
# correctness, one for secrecy.
_EPSILON_SHARES = 8


@dataclass(frozen=True)
class ProtocolParams:
    """Protocol configuration for a three-intensity decoy protocol.

    Attributes:
        mu: signal intensity (mean photons per pulse).
        nu1: stronger decoy intensity, below mu.
        nu2: weaker decoy intensity, below nu1 (may be 0 for vacuum).
        p_mu / p_nu1 / p_nu2: emission probabilities, summing to 1.
        pz_sender / pz_receiver: probability of choosing the key basis.
        f_ec: error-correction inefficiency, at least 1.
        e_det: intrinsic error probability of a detected signal photon.
        epsilon: total security failure budget.
        session_s: accounting session length in seconds; None for the
            asymptotic limit.
        clock_ghz: pulse repetition rate in GHz.
    """

    mu: float = 0.5
    nu1: float = 0.1
    nu2: float = 0.0007
    p_mu: float = 0.7
    p_nu1: float = 0.2
    p_nu2: float = 0.1
    pz_sender: float = 0.9
    pz_receiver: float = 0.9
    f_ec: float = 1.15
    e_det: float = 0.01
    epsilon: float = 1.0e-10
    session_s: float | None = 1200.0
    clock_ghz: float = 1.0

    def __post_init__(self) -> None:
        if not self.mu > self.nu1 > self.nu2 >= 0.0:
            raise ParameterError(
                f"intensities must satisfy mu > nu1 > nu2 >= 0, got "
                f"{self.mu}, {self.nu1}, {self.nu2}"
            )
        probs = (self.p_mu, self.p_nu1, self.p_nu2)
        if any(p <= 0.0 for p in probs):
            raise ParameterError(f"intensity probabilities must be positive, got {probs}")
        if abs(sum(probs) - 1.0) > 1.0e-9:
            raise ParameterError(f"intensity probabilities must sum to 1, got {sum(probs)}")
        for name, value in (("pz_sender", self.pz_sender), ("pz_receiver", self.pz_receiver)):
            if not 0.0 < value < 1.0:
                raise ParameterError(f"{name} must be in (0, 1), got {value}")
        if self.f_ec < 1.0:
            raise ParameterError(f"f_ec must be at least 1, got {self.f_ec}")
        if not 0.0 <= self.e_det <= 0.5:
            raise ParameterError(f"e_det must be in [0, 0.5], got {self.e_det}")
        if not 0.0 < self.epsilon < 1.0:
            raise ParameterError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.session_s is not None and self.session_s <= 0.0:
            raise ParameterError(f"session length must be positive, got {self.session_s}")
        if self.clock_ghz <= 0.0:
            raise ParameterError(f"clock must be positive, got {self.clock_ghz}")

    @property
    def clock_hz(self) -> float:
        return self.clock_ghz * 1.0e9

    @property
    def sifting_factor(self) -> float:
        """Probability that sender and receiver both used the key basis."""
        return self.pz_sender * self.pz_receiver

    def intensities(self) -> tuple[tuple[float, float], ...]:
        return ((self.mu, self.p_mu), (self.nu1, self.p_nu1), (self.nu2, self.p_nu2))


class GainPoint(NamedTuple):
    """Measured gain and error rate for one intensity."""

    gain: float
    error_rate: float


@dataclass(frozen=True)
class GainStats:
    """Per-intensity gains Q and error rates E for the three intensities."""

    q_mu: float
    e_mu: float
    q_nu1: float
    e_nu1: float
    q_nu2: float
    e_nu2: float

    def __post_init__(self) -> None:
        for name in ("q_mu", "q_nu1", "q_nu2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {value}")
        for name in ("e_mu", "e_nu1", "e_nu2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {value}")


@dataclass(frozen=True)
class DecoyBounds:
    """Single-photon bounds derived from the three intensities."""

    y0_lower: float
    y1_lower: float
    e1_upper: float
    q1_lower: float


@dataclass(frozen=True)
class SecureRateResult:
    """Key-rate outcome for one channel condition."""

    secure_bps: float
    sifted_bps: float
    qber_z: float
    qber_x: float
    y0: float
    bounds: DecoyBounds
    feasible: bool


def binary_entropy(p: float) -> float:
    """Shannon entropy of a binary variable, in bits.

    Defined on [0, 1] with H(0) = H(1) = 0.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"entropy argument must be in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def channel_gain(mu: float, eta_total: float, y0: float, e_det: float) -> GainPoint:
    """Gain and error rate of one intensity through a memoryless channel.

    Q = Y0 + (1 - exp(-eta*mu)) * (1 - Y0): a click is a background event,
    a photon detection, or both. Errors: background clicks are random,
    photon detections err with probability e_det; the error-weighted gain is
    E*Q = 0.5 * Y0 * exp(-eta*mu) + e_det * (1 - exp(-eta*mu)).
    """
    if mu < 0.0:
        raise ParameterError(f"intensity must be non-negative, got {mu}")
    if not 0.0 <= eta_total <= 1.0:
        raise ParameterError(f"total efficiency must be in [0, 1], got {eta_total}")
    if not 0.0 <= y0 <= 1.0:
        raise ParameterError(f"background yield must be in [0, 1], got {y0}")
    if not 0.0 <= e_det <= 0.5:
        raise ParameterError(f"e_det must be in [0, 0.5], got {e_det}")
    detect = -math.expm1(-eta_total * mu)
    # Exact values live in [0, 1] and [0, 0.5]; the clamps absorb the last
    # ulp of rounding in the union and the division.
    gain = min(1.0, y0 + detect - y0 * detect)
    error_weighted = 0.5 * y0 * (1.0 - detect) + e_det * detect
    if gain <= 0.0:
        return GainPoint(gain=0.0, error_rate=0.5)
    return GainPoint(gain=gain, error_rate=min(0.5, error_weighted / gain))


def gain_stats(eta_total: float, y0: float, params: ProtocolParams) -> GainStats:
    """Evaluate the channel model at all three protocol intensities."""
    points = {
        mu: channel_gain(mu, eta_total, y0, params.e_det)
        for mu, _ in params.intensities()
    }
    return GainStats(
        q_mu=points[params.mu].gain,
        e_mu=points[params.mu].error_rate,
        q_nu1=points[params.nu1].gain,
        e_nu1=points[params.nu1].error_rate,
        q_nu2=points[params.nu2].gain,
        e_nu2=points[params.nu2].error_rate,
    )


def hoeffding_deviation(samples: float, failure_prob: float) -> float:
    """Two-sided Hoeffding deviation for a mean of ``samples`` bits."""
    if samples <= 0.0:
        raise ParameterError(f"sample count must be positive, got {samples}")
    if not 0.0 < failure_prob < 1.0:
        raise ParameterError(f"failure probability must be in (0, 1), got {failure_prob}")
    return math.sqrt(math.log(2.0 / failure_prob) / (2.0 * samples))


def _deviations(params: ProtocolParams) -> dict[float, float]:
    """Per-intensity Hoeffding deviations for the configured session.

    The accounting sample for each intensity is the number of key-basis
    sifted pulses carrying that intensity. Empty dict in asymptotic mode.
    """
    if params.session_s is None:
        return {}
    pulses = params.session_s * params.clock_hz
    eps_share = params.epsilon / _EPSILON_SHARES
    out: dict[float, float] = {}
    for mu, p_mu in params.intensities():
        samples = pulses * p_mu * params.sifting_factor
        out[mu] = hoeffding_deviation(samples, eps_share)
    return out


def _clip(value: float, lo: float, hi: float) -> float:
    return min(hi, max(lo, value))


def decoy_bounds(stats: GainStats, params: ProtocolParams) -> DecoyBounds:
    """Two-decoy bounds on vacuum yield, single-photon yield, and phase error.

    In finite-size mode every gain and error rate is first shifted
    adversarially by its Hoeffding deviation; each bound then takes the
    worst corner of the resulting box, which keeps the result a valid
    (if slightly loose) bound.
    """
    mu, nu1, nu2 = params.mu, params.nu1, params.nu2
    dev = _deviations(params)
    d_mu = dev.get(mu, 0.0)
    d_n1 = dev.get(nu1, 0.0)
    d_n2 = dev.get(nu2, 0.0)

    # Shift gains toward the corner that depresses the single-photon yield.
    q_mu_hi = _clip(stats.q_mu + d_mu, 0.0, 1.0)
    q_n1_lo = _clip(stats.q_nu1 - d_n1, 0.0, 1.0)
    q_n1_hi = _clip(stats.q_nu1 + d_n1, 0.0, 1.0)
    q_n2_lo = _clip(stats.q_nu2 - d_n2, 0.0, 1.0)
    q_n2_hi = _clip(stats.q_nu2 + d_n2, 0.0, 1.0)
    e_n1_hi = _clip(stats.e_nu1 + d_n1, 0.0, 1.0)
    e_n2_lo = _clip(stats.e_nu2 - d_n2, 0.0, 1.0)

    # Vacuum yield: low Q(nu2) and high Q(nu1) give the smallest estimate.
    y0 = (nu1 * q_n2_lo * math.exp(nu2) - nu2 * q_n1_hi * math.exp(nu1)) / (nu1 - nu2)
    y0_lower = max(0.0, y0)

    # Single-photon yield bound from the pair of decoys plus the signal.
    denom = mu * nu1 - mu * nu2 - nu1 * nu1 + nu2 * nu2
    if denom <= 0.0:
        raise ParameterError(
            f"intensity triple ({mu}, {nu1}, {nu2}) gives a degenerate decoy system"
        )
    bracket = (
        q_n1_lo * math.exp(nu1)
        - q_n2_hi * math.exp(nu2)
        - (nu1 * nu1 - nu2 * nu2) / (mu * mu) * (q_mu_hi * math.exp(mu) - y0_lower)
    )
    y1_lower = max(0.0, mu / denom * bracket)

    # Phase-error bound; collapses to the pessimal value if Y1 vanished.
    if y1_lower <= 0.0:
        e1_upper = 0.5
    else:
        err_num = (
            e_n1_hi * q_n1_hi * math.exp(nu1) - e_n2_lo * q_n2_lo * math.exp(nu2)
        )
        e1_upper = _clip(err_num / ((nu1 - nu2) * y1_lower), 0.0, 0.5)

    q1_lower = y1_lower * mu * math.exp(-mu)
    return DecoyBounds(
        y0_lower=y0_lower, y1_lower=y1_lower, e1_upper=e1_upper, q1_lower=q1_lower
    )


def secure_key_rate(stats: GainStats, bounds: DecoyBounds, params: ProtocolParams) -> float:
    """Secure key rate in bits per second.

    Rate = sifting * P(mu) * clock * [Q1_L * (1 - H2(e1_U)) - f_ec * Q_mu * H2(E_mu)]
    minus a fixed correctness/secrecy debit in finite-size mode, clamped at 0.
    """
    dev = _deviations(params)
    d_mu = dev.get(params.mu, 0.0)
    # Error correction is paid on the (pessimistically shifted) signal gain.
    q_mu = _clip(stats.q_mu + d_mu, 0.0, 1.0)
    e_mu = _clip(stats.e_mu + d_mu, 0.0, 1.0)
    ec_cost = params.f_ec * q_mu * binary_entropy(min(e_mu, 0.5))
    per_pulse = bounds.q1_lower * (1.0 - binary_entropy(bounds.e1_upper)) - ec_cost
    rate = params.sifting_factor * params.p_mu * params.clock_hz * per_pulse
    if params.session_s is not None:
        eps_share = params.epsilon / _EPSILON_SHARES
        debit_bits = math.log2(2.0 / eps_share) + 2.0 * math.log2(2.0 / eps_share)
        rate -= debit_bits / params.session_s
    return max(0.0, rate)


def sifted_rate(stats: GainStats, params: ProtocolParams) -> float:
    """Key-basis sifted detection rate across all intensities, in 1/s."""
    mean_gain = (
        params.p_mu * stats.q_mu
        + params.p_nu1 * stats.q_nu1
        + params.p_nu2 * stats.q_nu2
    )
    return params.sifting_factor * params.clock_hz * mean_gain


def qber_of_scenario(
    noise_power_w: float,
    link: LinkBudget,
    chain: FilterChain,
    det: DetectorSpec,
    params: ProtocolParams,
) -> SecureRateResult:
    """End-to-end evaluation of one channel condition.

    ``noise_power_w`` is the in-band classical noise at the input of the
    receiver chain (fiber output). The signal pays the link budget, the
    chain insertion loss, and the detector efficiency; the noise pays the
    chain insertion loss and is then converted to a per-gate click
    probability through the detector model.
    """
    if noise_power_w < 0.0:
        raise ParameterError(f"noise power must be non-negative, got {noise_power_w}")
    wavelength = chain.narrowest.center.wavelength_nm
    noise_at_detector = noise_power_w * db_to_linear(-chain.insertion_db)
    y0 = noise_click_probability(noise_at_detector, wavelength, det)
    eta_total = db_to_linear(-(link.total_db + chain.insertion_db)) * det.efficiency
    stats = gain_stats(eta_total, y0, params)
    bounds = decoy_bounds(stats, params)
    secure = secure_key_rate(stats, bounds, params)
    # The error model is basis symmetric, so both reported QBERs coincide;
    # they are kept separate in the result because downstream consumers
    # treat them as distinct observables.
    return SecureRateResult(
        secure_bps=secure,
        sifted_bps=sifted_rate(stats, params),
        qber_z=stats.e_mu,
        qber_x=stats.e_mu,
        y0=y0,
        bounds=bounds,
        feasible=secure > 0.0,
    )
