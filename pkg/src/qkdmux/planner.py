"""Channel planning: who sits where on the grid, at what power.

A plan is a set of grid assignments (one quantum channel, any number of
data channels, optionally a clock channel) plus per-channel mux losses.
Validation checks grid collisions and worst-case crosstalk; provisioning
assigns launch powers, either adapted to receiver sensitivity or fixed.
The search helpers answer the two questions the trade-off curves pose:
how much data bandwidth fits at a distance, and how far a fixed bandwidth
reaches.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Literal, NamedTuple, Sequence

from .classical10g import TransceiverSpec, adapted_launch_dbm, error_free, received_power_dbm
from .errors import ParameterError, PlanError
from .linkmodel import ComponentLoss, FiberSpec, ItuChannel, LinkBudget, dbm_to_watts
from .raman import DEFAULT_ISOLATION, IsolationModel

Role = Literal["quantum", "data", "clock"]
Direction = Literal["co", "counter"]


@dataclass(frozen=True)
class ChannelAssignment:
    """One occupied slot on the grid."""

    channel: ItuChannel
    role: Role
    launch_dbm: float | None = None
    direction: Direction = "co"
    mux_loss_db: float = 1.2
    demux_loss_db: float = 1.2

    def __post_init__(self) -> None:
        if self.role not in ("quantum", "data", "clock"):
            raise ParameterError(f"unknown channel role {self.role!r}")
        if self.direction not in ("co", "counter"):
            raise ParameterError(f"unknown propagation direction {self.direction!r}")
        if self.mux_loss_db < 0.0 or self.demux_loss_db < 0.0:
            raise ParameterError("mux and demux losses must be non-negative")
        if self.role == "quantum" and self.launch_dbm is not None:
            raise ParameterError("the quantum channel does not carry a classical launch power")

    @property
    def launch_w(self) -> float | None:
        if self.launch_dbm is None:
            return None
        return dbm_to_watts(self.launch_dbm)

    def powered(self, launch_dbm: float) -> "ChannelAssignment":
        return replace(self, launch_dbm=launch_dbm)


@dataclass(frozen=True)
class LaunchPolicy:
    """How classical launch powers are chosen.

    kind "adapted" backs each data laser off to its receiver sensitivity
    plus margin; "fixed" uses fixed_dbm for every data channel.
    """

    kind: Literal["adapted", "fixed"] = "adapted"
    fixed_dbm: float | None = None
    margin_db: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("adapted", "fixed"):
            raise ParameterError(f"unknown launch policy {self.kind!r}")
        if self.kind == "fixed" and self.fixed_dbm is None:
            raise ParameterError("a fixed launch policy needs fixed_dbm")
        if self.margin_db < 0.0:
            raise ParameterError(f"margin must be non-negative, got {self.margin_db}")


@dataclass(frozen=True)
class ChannelPlan:
    """A complete grid assignment."""

    assignments: tuple[ChannelAssignment, ...]

    def __post_init__(self) -> None:
        if not self.assignments:
            raise ParameterError("a plan needs at least one assignment")
        quantum = [a for a in self.assignments if a.role == "quantum"]
        if len(quantum) != 1:
            raise ParameterError(f"a plan needs exactly one quantum channel, got {len(quantum)}")
        seen: set[int] = set()
        for a in self.assignments:
            if a.channel.index in seen:
                raise ParameterError(f"grid channel {a.channel.index} is assigned twice")
            seen.add(a.channel.index)

    @property
    def quantum(self) -> ChannelAssignment:
        return next(a for a in self.assignments if a.role == "quantum")

    @property
    def data_channels(self) -> tuple[ChannelAssignment, ...]:
        return tuple(a for a in self.assignments if a.role == "data")

    @property
    def clock_channels(self) -> tuple[ChannelAssignment, ...]:
        return tuple(a for a in self.assignments if a.role == "clock")

    @property
    def classical(self) -> tuple[ChannelAssignment, ...]:
        return tuple(a for a in self.assignments if a.role != "quantum")

    def aggregate_bitrate_gbps(self, per_channel_gbps: float = 10.0) -> float:
        return per_channel_gbps * len(self.data_channels)


@dataclass(frozen=True)
class PlanReport:
    """Validation outcome: hard failures raise, soft concerns are listed."""

    plan: ChannelPlan
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def clean(self) -> bool:
        return not self.warnings


def data_link_budget(fiber: FiberSpec, assignment: ChannelAssignment) -> LinkBudget:
    """End-to-end budget for one classical channel: fiber plus both muxes."""
    return LinkBudget(
        fiber=fiber,
        components=(
            ComponentLoss("mux", assignment.mux_loss_db),
            ComponentLoss("demux", assignment.demux_loss_db),
        ),
    )


def validate_plan(
    plan: ChannelPlan,
    isolation: IsolationModel = DEFAULT_ISOLATION,
    raman_budget_w: float | None = None,
    leakage_fraction: float = 0.1,
) -> PlanReport:
    """Check a plan for layout hazards.

    Adjacency of any classical channel to the quantum channel is flagged,
    as is any single crosstalk contribution above ``leakage_fraction`` of
    ``raman_budget_w`` (when a budget is given). Grid collisions and
    multiple quantum channels are hard errors raised by ChannelPlan itself.
    """
    if not 0.0 < leakage_fraction <= 1.0:
        raise ParameterError(f"leakage fraction must be in (0, 1], got {leakage_fraction}")
    warnings: list[str] = []
    q_index = plan.quantum.channel.index
    for a in plan.classical:
        spacing = abs(a.channel.index - q_index)
        if spacing == 1:
            warnings.append(
                f"channel {a.channel.index} ({a.role}) is grid-adjacent to the "
                f"quantum channel; worst-case isolation drops to "
                f"{isolation.adjacent_db:.0f} dB"
            )
        if raman_budget_w is not None and a.launch_dbm is not None:
            launch_w = dbm_to_watts(a.launch_dbm)
            leak_w = launch_w * 10.0 ** (-isolation.isolation_db(spacing) / 10.0)
            if leak_w > leakage_fraction * raman_budget_w:
                warnings.append(
                    f"channel {a.channel.index} ({a.role}) leaks {leak_w:.3e} W "
                    f"into the quantum band, above {leakage_fraction:.0%} of the "
                    f"noise budget {raman_budget_w:.3e} W"
                )
    return PlanReport(plan=plan, warnings=tuple(warnings))


def provision(
    plan: ChannelPlan,
    fiber: FiberSpec,
    transceiver: TransceiverSpec,
    policy: LaunchPolicy = LaunchPolicy(),
) -> ChannelPlan:
    """Assign launch powers to every classical channel.

    Data channels follow the policy. Clock channels keep a preconfigured
    power and are left unpowered otherwise: a dark clock slot models a
    receiver that recovers timing from the data itself. Raises PlanError
    when the policy cannot close the link within the transmitter ceiling.
    """
    new_assignments: list[ChannelAssignment] = []
    for a in plan.assignments:
        if a.role == "quantum":
            new_assignments.append(a)
            continue
        if a.role == "clock":
            new_assignments.append(a)
            continue
        budget = data_link_budget(fiber, a)
        if policy.kind == "adapted":
            try:
                launch = adapted_launch_dbm(budget, transceiver, policy.margin_db)
            except ParameterError as exc:
                raise PlanError(str(exc)) from exc
        else:
            assert policy.fixed_dbm is not None
            launch = policy.fixed_dbm
            if launch > transceiver.max_launch_dbm + 1.0e-9:
                raise PlanError(
                    f"fixed launch {launch:.2f} dBm exceeds the transmitter "
                    f"ceiling {transceiver.max_launch_dbm:.2f} dBm"
                )
            received = received_power_dbm(launch, budget.total_db)
            if not error_free(received, transceiver):
                raise PlanError(
                    f"fixed launch {launch:.2f} dBm leaves {received:.2f} dBm at the "
                    f"receiver, below the sensitivity {transceiver.sensitivity_dbm:.2f} dBm"
                )
        new_assignments.append(a.powered(launch))
    return ChannelPlan(assignments=tuple(new_assignments))


def combined_launch_dbm(plan: ChannelPlan) -> float:
    """Total classical power entering the fiber, in dBm."""
    total_w = sum(a.launch_w for a in plan.classical if a.launch_w is not None)
    if total_w <= 0.0:
        raise PlanError("no classical channel carries power yet; provision the plan first")
    import math

    return 10.0 * math.log10(total_w / 1.0e-3)


def max_feasible_count(feasible: Callable[[int], bool], upper: int) -> int:
    """Largest n in [0, upper] accepted by a monotone feasibility predicate.

    Doubling probe followed by binary search; 0 when even n=1 fails.
    """
    if upper < 1:
        raise ParameterError(f"search bound must be at least 1, got {upper}")
    if not feasible(1):
        return 0
    lo = 1
    hi = 1
    while hi < upper and feasible(min(hi * 2, upper)):
        lo = min(hi * 2, upper)
        hi = min(hi * 2, upper)
        if lo == upper:
            return upper
    hi = min(hi * 2, upper)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def max_feasible_length_km(
    feasible: Callable[[float], bool],
    lower_km: float,
    upper_km: float,
    resolution_km: float = 1.0,
) -> float | None:
    """Largest feasible length on [lower, upper], to within resolution.

    Returns None when the lower end is already infeasible. Assumes
    feasibility is monotone in length.
    """
    if lower_km < 0.0 or upper_km <= lower_km:
        raise ParameterError(f"bad search range [{lower_km}, {upper_km}] km")
    if resolution_km <= 0.0:
        raise ParameterError(f"resolution must be positive, got {resolution_km}")
    if not feasible(lower_km):
        return None
    if feasible(upper_km):
        return upper_km
    lo, hi = lower_km, upper_km
    while hi - lo > resolution_km:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo


def expand_data_channels(
    base: Sequence[ChannelAssignment],
    count: int,
) -> tuple[ChannelAssignment, ...]:
    """First ``count`` data channels from a template, preserving order.

    The template must hold at least ``count`` data channels; quantum and
    clock assignments pass through untouched.
    """
    if count < 0:
        raise ParameterError(f"channel count must be non-negative, got {count}")
    data = [a for a in base if a.role == "data"]
    if len(data) < count:
        raise PlanError(
            f"plan template offers {len(data)} data channels, need {count}"
        )
    keep = set(id(a) for a in data[:count])
    out = tuple(a for a in base if a.role != "data" or id(a) in keep)
    return out


class BandwidthSearch(NamedTuple):
    """Result of the channel-count search at a fixed distance."""

    count: int
    aggregate_gbps: float
    curve: tuple
    noise_free: bool


def max_data_bandwidth(scenario, upper: int = 64) -> BandwidthSearch:
    """Largest data-channel count with a positive secure rate.

    Channel counts beyond the configured plan reuse the equivalent-noise
    scaling of the bandwidth sweep: total classical power, and with it the
    scattered noise, grows linearly with the count. The returned curve
    holds one evaluated row per count from 1 up to one past the maximum
    (clamped to ``upper``). ``noise_free`` flags a search that never found
    an infeasible count below the cap, which is what a (near) zero noise
    coefficient looks like; the count is then just the cap.

    Raises:
        PlanError: If not even a single data channel is feasible.
    """
    from .sweep import evaluate_point

    probe = scenario.with_sweep("bandwidth", (1.0,))

    def feasible(count: int) -> bool:
        return evaluate_point(probe, float(count)).secure_bps > 0.0

    best = max_feasible_count(feasible, upper)
    if best == 0:
        raise PlanError(
            "no secure key even with a single data channel; the noise floor "
            "already exceeds the budget at this distance"
        )
    curve = tuple(
        evaluate_point(probe, float(n)) for n in range(1, min(best + 1, upper) + 1)
    )
    return BandwidthSearch(
        count=best,
        aggregate_gbps=best * scenario.transceiver.bitrate_gbps,
        curve=curve,
        noise_free=best == upper,
    )


def max_distance(
    scenario,
    policy: LaunchPolicy | None = None,
    filter_option: str = "measured",
    lower_km: float = 1.0,
    upper_km: float = 150.0,
    resolution_km: float = 1.0,
) -> float | None:
    """Longest fiber with a positive secure rate, to within a resolution.

    ``filter_option`` selects the receiver as configured ("measured") or
    with the narrowest filter replaced by a transform-limited one at the
    same insertion loss ("tbp_ideal"). An adapted policy re-provisions the
    data launch powers at every probed length.
    """
    from .sweep import evaluate_point

    if filter_option not in ("measured", "tbp_ideal"):
        raise ParameterError(f"unknown filter option {filter_option!r}")
    variant = scenario.without_sweep()
    if policy is not None:
        variant = variant.with_policy(policy)
    if filter_option == "tbp_ideal":
        variant = variant.with_ideal_filtering()
    probe = variant.with_sweep("distance", (lower_km,))

    def feasible(length_km: float) -> bool:
        return evaluate_point(probe, length_km).secure_bps > 0.0

    return max_feasible_length_km(feasible, lower_km, upper_km, resolution_km)
