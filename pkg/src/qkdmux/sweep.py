"""Deterministic sweep execution and emission.

A sweep evaluates one scenario across its axis values. Every point is a pure
function of the scenario, so runs are reproducible row for row and repeated
emission is byte-identical. Points that cannot produce key are still emitted,
with a zero rate, so curves keep their full domain.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable

from .errors import ParameterError, PlanError
from .keyrate import SecureRateResult, qber_of_scenario
from .linkmodel import watts_to_dbm
from .planner import ChannelPlan, provision
from .raman import AggregateNoise, RamanContribution, aggregate_noise
from .scenario import Scenario

CSV_COLUMNS = (
    "axis_value",
    "link_loss_db",
    "noise_power_w",
    "y0",
    "qber_z",
    "qber_x",
    "sifted_bps",
    "secure_bps",
    "feasible",
)


@dataclass(frozen=True)
class SweepRow:
    """One evaluated point; the first nine fields are the CSV columns."""

    axis_value: float
    link_loss_db: float
    noise_power_w: float
    y0: float
    qber_z: float
    qber_x: float
    sifted_bps: float
    secure_bps: float
    feasible: bool
    contributions: tuple[RamanContribution, ...] = ()

    def csv_cells(self) -> tuple[str, ...]:
        values = (
            self.axis_value,
            self.link_loss_db,
            self.noise_power_w,
            self.y0,
            self.qber_z,
            self.qber_x,
            self.sifted_bps,
            self.secure_bps,
        )
        return tuple(f"{v:.9g}" for v in values) + ("true" if self.feasible else "false",)


@dataclass(frozen=True)
class SweepTable:
    scenario: Scenario
    rows: tuple[SweepRow, ...]


def _point_scenario(scenario: Scenario, axis_value: float) -> tuple[Scenario, float]:
    """Specialize the scenario to one axis value.

    Returns the specialized scenario and the factor by which the classical
    noise of its plan must be scaled (only the bandwidth axis uses a factor
    other than one).
    """
    axis = scenario.sweep_axis
    if axis == "distance":
        return scenario.with_fiber_length(axis_value), 1.0
    if axis == "bandwidth":
        base = len(scenario.plan.data_channels)
        if base == 0:
            raise ParameterError("bandwidth sweep needs at least one data channel")
        return scenario, axis_value / base
    if axis == "combined_power":
        data = scenario.plan.data_channels
        if not data:
            raise ParameterError("combined-power sweep needs data channels")
        per_channel = axis_value - 10.0 * math.log10(len(data))
        updated = tuple(
            a.powered(per_channel) if a.role == "data" else a
            for a in scenario.plan.assignments
        )
        fixed = replace(scenario.policy, kind="fixed", fixed_dbm=per_channel)
        return replace(
            scenario, plan=ChannelPlan(assignments=updated), policy=fixed
        ), 1.0
    return scenario, 1.0


def _infeasible_row(scenario: Scenario, axis_value: float) -> SweepRow:
    return SweepRow(
        axis_value=axis_value,
        link_loss_db=scenario.reported_loss_db(),
        noise_power_w=0.0,
        y0=0.0,
        qber_z=0.5,
        qber_x=0.5,
        sifted_bps=0.0,
        secure_bps=0.0,
        feasible=False,
    )


def evaluate_point(scenario: Scenario, axis_value: float | None = None) -> SweepRow:
    """Evaluate one sweep point end to end.

    Provisions classical launch powers, integrates the Raman and crosstalk
    noise into the quantum receiver band, and runs the key-rate model.
    """
    if axis_value is None:
        axis_value = scenario.fiber.length_km
        point, factor = scenario, 1.0
    else:
        point, factor = _point_scenario(scenario, axis_value)

    try:
        powered = provision(point.plan, point.fiber, point.transceiver, point.policy)
    except PlanError:
        return _infeasible_row(point, axis_value)

    noise: AggregateNoise = aggregate_noise(
        sources=powered.classical,
        quantum=powered.quantum.channel,
        fiber=point.fiber,
        profile=point.raman,
        bandwidth_nm=point.chain.net_bandwidth_nm,
        isolation=point.isolation,
    )
    noise_w = noise.total_w * factor

    result: SecureRateResult = qber_of_scenario(
        noise_power_w=noise_w,
        link=point.quantum_link,
        chain=point.chain,
        det=point.detector,
        params=point.protocol,
    )
    return SweepRow(
        axis_value=axis_value,
        link_loss_db=point.reported_loss_db(),
        noise_power_w=noise_w,
        y0=result.y0,
        qber_z=result.qber_z,
        qber_x=result.qber_x,
        sifted_bps=result.sifted_bps,
        secure_bps=result.secure_bps,
        feasible=result.feasible,
        contributions=noise.contributions,
    )


def run_sweep(scenario: Scenario, jobs: int = 1) -> SweepTable:
    """Evaluate every sweep point; a scenario without a sweep yields one row."""
    if scenario.sweep_axis == "none" or not scenario.sweep_values:
        values: tuple[float, ...] = (scenario.fiber.length_km,)
        rows: Iterable[SweepRow] = (evaluate_point(scenario, None),)
    else:
        values = scenario.sweep_values
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                rows = tuple(pool.map(lambda v: evaluate_point(scenario, v), values))
        else:
            rows = tuple(evaluate_point(scenario, v) for v in values)
    ordered = tuple(sorted(rows, key=lambda r: r.axis_value))
    return SweepTable(scenario=scenario, rows=ordered)


def _scenario_echo(scenario: Scenario) -> list[str]:
    lines = [
        f"scenario: {scenario.name}",
        f"fiber: {scenario.fiber.length_km:g} km at "
        f"{scenario.fiber.attenuation_db_per_km:g} dB/km",
    ]
    for a in scenario.plan.assignments:
        power = "dark" if a.launch_dbm is None else f"{a.launch_dbm:g} dBm"
        extra = "" if a.role == "quantum" else f" {a.direction} {power}"
        lines.append(f"channel {a.channel.index}: {a.role}{extra} "
                     f"({a.channel.wavelength_nm:.2f} nm)")
    for f in scenario.chain.filters:
        lines.append(
            f"filter: {f.fwhm_ghz:g} GHz FWHM, insertion {f.insertion_db:g} dB"
        )
    gate = scenario.chain.gate
    lines.append(f"gate: {gate.window_ps:g} ps window at {gate.clock_ghz:g} GHz")
    det = scenario.detector
    lines.append(
        f"detector: efficiency {det.efficiency:g}, dark {det.dark_rate_hz:g} /s, "
        f"afterpulse {det.afterpulse:g}"
    )
    p = scenario.protocol
    session = "asymptotic" if p.session_s is None else f"{p.session_s:g} s"
    lines.append(
        f"protocol: mu {p.mu:g}, nu1 {p.nu1:g}, nu2 {p.nu2:g}, e_det {p.e_det:g}, "
        f"f_ec {p.f_ec:g}, epsilon {p.epsilon:g}, session {session}"
    )
    pol = scenario.policy
    if pol.kind == "fixed":
        lines.append(f"policy: fixed {pol.fixed_dbm:g} dBm per data channel")
    else:
        lines.append(f"policy: adapted launch, margin {pol.margin_db:g} dB")
    lines.append(f"raman scale: {scenario.raman.scale:.6g} (km nm)^-1 per W")
    lines.append(f"loss convention: {scenario.loss_convention}")
    if scenario.sweep_axis == "none":
        lines.append("sweep: none (single point)")
    else:
        lines.append(
            f"sweep: {scenario.sweep_axis} over {len(scenario.sweep_values)} points"
        )
    return lines


def _assumptions(scenario: Scenario) -> list[str]:
    from .filterchain import tbp_audit

    chain = scenario.chain
    audit = tbp_audit(chain)
    gate = chain.gate
    lines = [
        f"temporal gate acceptance {gate.acceptance_db:.1f} dB "
        f"({gate.window_ps:g} ps window, {gate.clock_ghz:g} GHz clock)",
        f"noise bandwidth {chain.net_bandwidth_nm:.4g} nm set by the narrowest "
        f"filter ({chain.net_fwhm_ghz:g} GHz)",
        f"time-bandwidth product {audit.tbp:.4g}, {audit.ratio:.3g}x the "
        f"{audit.limit:.4g} transform limit",
        f"out-of-band carriers attenuated by mux isolation plus "
        f"{scenario.isolation.filter_stopband_db:g} dB receiver stopband",
        "spontaneous Raman scattering integrated over the receiver band with "
        "calibrated spectral density",
    ]
    p = scenario.protocol
    if p.session_s is None:
        lines.append("asymptotic key-rate bounds (no statistical deviations)")
    else:
        lines.append(
            f"finite-session bounds: epsilon {p.epsilon:g} split over "
            f"{p.session_s:g} s sessions, Hoeffding-style deviations"
        )
    return lines


def emit(table: SweepTable, format: str = "csv") -> str:
    """Render a sweep table; identical input yields identical bytes."""
    if format not in ("csv", "report"):
        raise ParameterError(f"unknown emit format {format!r}")
    if not table.rows:
        raise ParameterError("cannot emit an empty table")
    body = [",".join(CSV_COLUMNS)]
    body.extend(",".join(row.csv_cells()) for row in table.rows)
    csv_text = "\n".join(body) + "\n"
    if format == "csv":
        return csv_text
    header = [f"# {line}" for line in _scenario_echo(table.scenario)]
    header.append("# assumptions:")
    header.extend(f"#   - {line}" for line in _assumptions(table.scenario))
    return "\n".join(header) + "\n" + csv_text
