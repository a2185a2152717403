"""Quantum key distribution over lit DWDM fiber: noise model and planner.

The package answers one engineering question from several angles: how much
classical 10 Gb/s traffic can share a fiber with a quantum channel before
spontaneous Raman scattering erases the secure key rate, and what launch
powers, filters, and channel placements keep the link alive.
"""

from .calibration import Anchor, CalibrationResult, anchors_from_spec, apply_params, calibrate
from .classical10g import (
    TransceiverSpec,
    adapted_launch_dbm,
    ber_at_power,
    ber_for_q_factor,
    error_free,
    q_factor_for_ber,
    received_power_dbm,
)
from .detection import (
    ClickRates,
    DetectorSpec,
    click_probability,
    is_saturating,
    noise_click_probability,
    sample_counts,
)
from .errors import CalibrationError, ParameterError, PlanError, ScenarioError
from .filterchain import (
    TBP_LIMIT,
    FilterChain,
    SpectralFilter,
    TbpAudit,
    TemporalGate,
    ideal_fwhm_ghz,
    spectral_rejection_db,
    tbp_audit,
    temporal_acceptance_db,
    time_bandwidth_product,
)
from .keyrate import (
    DecoyBounds,
    GainStats,
    ProtocolParams,
    SecureRateResult,
    binary_entropy,
    channel_gain,
    decoy_bounds,
    gain_stats,
    hoeffding_deviation,
    qber_of_scenario,
    secure_key_rate,
    sifted_rate,
)
from .linkmodel import (
    ComponentLoss,
    FiberSpec,
    ItuChannel,
    LinkBudget,
    channel_detuning_nm,
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    watts_to_dbm,
)
from .planner import (
    BandwidthSearch,
    ChannelAssignment,
    ChannelPlan,
    LaunchPolicy,
    PlanReport,
    combined_launch_dbm,
    max_data_bandwidth,
    max_distance,
    provision,
    validate_plan,
)
from .raman import (
    DEFAULT_ISOLATION,
    AggregateNoise,
    IsolationModel,
    RamanProfile,
    aggregate_noise,
    backward_raman_power,
    crosstalk_leakage,
    forward_raman_power,
)
from .scenario import Scenario, bundled_scenario, bundled_scenario_names, load_scenario
from .sweep import CSV_COLUMNS, SweepRow, SweepTable, emit, evaluate_point, run_sweep

__version__ = "0.1.0"

__all__ = [
    "Anchor",
    "CalibrationResult",
    "anchors_from_spec",
    "apply_params",
    "calibrate",
    "TransceiverSpec",
    "adapted_launch_dbm",
    "ber_at_power",
    "ber_for_q_factor",
    "error_free",
    "q_factor_for_ber",
    "received_power_dbm",
    "ClickRates",
    "DetectorSpec",
    "click_probability",
    "is_saturating",
    "noise_click_probability",
    "sample_counts",
    "CalibrationError",
    "ParameterError",
    "PlanError",
    "ScenarioError",
    "TBP_LIMIT",
    "FilterChain",
    "SpectralFilter",
    "TbpAudit",
    "TemporalGate",
    "ideal_fwhm_ghz",
    "spectral_rejection_db",
    "tbp_audit",
    "temporal_acceptance_db",
    "time_bandwidth_product",
    "DecoyBounds",
    "GainStats",
    "ProtocolParams",
    "SecureRateResult",
    "binary_entropy",
    "channel_gain",
    "decoy_bounds",
    "gain_stats",
    "hoeffding_deviation",
    "qber_of_scenario",
    "secure_key_rate",
    "sifted_rate",
    "ComponentLoss",
    "FiberSpec",
    "ItuChannel",
    "LinkBudget",
    "channel_detuning_nm",
    "db_to_linear",
    "dbm_to_watts",
    "linear_to_db",
    "watts_to_dbm",
    "BandwidthSearch",
    "ChannelAssignment",
    "ChannelPlan",
    "LaunchPolicy",
    "PlanReport",
    "combined_launch_dbm",
    "max_data_bandwidth",
    "max_distance",
    "provision",
    "validate_plan",
    "DEFAULT_ISOLATION",
    "AggregateNoise",
    "IsolationModel",
    "RamanProfile",
    "aggregate_noise",
    "backward_raman_power",
    "crosstalk_leakage",
    "forward_raman_power",
    "Scenario",
    "bundled_scenario",
    "bundled_scenario_names",
    "load_scenario",
    "CSV_COLUMNS",
    "SweepRow",
    "SweepTable",
    "emit",
    "evaluate_point",
    "run_sweep",
]
