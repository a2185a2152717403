"""Scenario files: one TOML document describing a complete experiment.

A scenario bundles the fiber, the channel plan, the receiver chain, the
detector, the protocol, the classical transceiver, the launch policy, the
Raman profile, and an optional sweep axis. Loading is strict: unknown keys
anywhere in the document are an error, and all validation problems are
reported together rather than one at a time.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Literal, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .classical10g import TransceiverSpec
from .detection import DetectorSpec
from .errors import ParameterError, ScenarioError
from .filterchain import FilterChain, SpectralFilter, TemporalGate
from .keyrate import ProtocolParams
from .linkmodel import ComponentLoss, FiberSpec, ItuChannel, LinkBudget
from .planner import ChannelAssignment, ChannelPlan, LaunchPolicy
from .raman import DEFAULT_ISOLATION, IsolationModel, RamanProfile

SCHEMA_VERSION = 1

SweepAxis = Literal["distance", "bandwidth", "combined_power", "none"]
LossConvention = Literal["end_to_end", "fiber_only"]

_AXES = ("distance", "bandwidth", "combined_power", "none")
_CONVENTIONS = ("end_to_end", "fiber_only")
_ROLES = ("data", "clock")
_METRICS = ("secure_bps", "sifted_bps", "qber_z")


@dataclass(frozen=True)
class CalibrationAnchorSpec:
    """One declared calibration target, referencing a sweep point."""

    axis_value: float
    metric: str
    target: float
    weight: float = 1.0


@dataclass(frozen=True)
class CalibrationSpec:
    """Free parameters and anchors declared by a scenario."""

    free: tuple[str, ...]
    anchors: tuple[CalibrationAnchorSpec, ...]


@dataclass(frozen=True)
class Scenario:
    """A fully resolved experiment description."""

    name: str
    fiber: FiberSpec
    plan: ChannelPlan
    quantum_mux_loss_db: float
    chain: FilterChain
    detector: DetectorSpec
    protocol: ProtocolParams
    transceiver: TransceiverSpec
    policy: LaunchPolicy
    raman: RamanProfile
    isolation: IsolationModel = DEFAULT_ISOLATION
    sweep_axis: SweepAxis = "none"
    sweep_values: tuple[float, ...] = ()
    loss_convention: LossConvention = "end_to_end"
    seed: int = 1
    calibration: CalibrationSpec | None = None

    def __post_init__(self) -> None:
        if self.quantum_mux_loss_db < 0.0:
            raise ParameterError("quantum mux loss must be non-negative")
        if self.sweep_axis not in _AXES:
            raise ParameterError(f"unknown sweep axis {self.sweep_axis!r}")
        if self.sweep_axis != "none":
            if not self.sweep_values:
                raise ParameterError(f"sweep axis {self.sweep_axis!r} needs values")
            if any(b <= a for a, b in zip(self.sweep_values, self.sweep_values[1:])):
                raise ParameterError("sweep values must be strictly increasing")
        if self.sweep_axis == "bandwidth":
            for v in self.sweep_values:
                if v != int(v) or v < 0:
                    raise ParameterError(
                        f"bandwidth sweep values are channel counts, got {v}"
                    )

    @property
    def quantum_link(self) -> LinkBudget:
        """Sender-side budget of the quantum channel: fiber plus its mux.

        The receiver demux is part of the filter chain and is accounted
        there, both for the signal and for the noise.
        """
        return LinkBudget(
            fiber=self.fiber,
            components=(ComponentLoss("mux", self.quantum_mux_loss_db),),
        )

    def reported_loss_db(self) -> float:
        """Link loss under the configured reporting convention."""
        if self.loss_convention == "fiber_only":
            return self.fiber.loss_db
        return self.quantum_link.total_db + self.chain.insertion_db

    # Override helpers: each returns a new scenario with one aspect changed.

    def with_fiber_length(self, length_km: float) -> "Scenario":
        return replace(self, fiber=replace(self.fiber, length_km=length_km))

    def with_policy(self, policy: LaunchPolicy) -> "Scenario":
        return replace(self, policy=policy)

    def with_protocol(self, **changes: Any) -> "Scenario":
        return replace(self, protocol=replace(self.protocol, **changes))

    def with_raman_scale(self, scale: float) -> "Scenario":
        return replace(self, raman=replace(self.raman, scale=scale))

    def with_detector(self, **changes: Any) -> "Scenario":
        return replace(self, detector=replace(self.detector, **changes))

    def with_sweep(self, axis: SweepAxis, values: Iterable[float]) -> "Scenario":
        return replace(self, sweep_axis=axis, sweep_values=tuple(values))

    def without_sweep(self) -> "Scenario":
        return replace(self, sweep_axis="none", sweep_values=())

    def with_ideal_filtering(self) -> "Scenario":
        """Replace the narrowest spectral filter with a transform-limited one."""
        return replace(self, chain=self.chain.with_ideal_spectral_width())

    def with_data_channels(self, assignments: Iterable[ChannelAssignment]) -> "Scenario":
        """Replace the data channels, keeping quantum and clock slots."""
        keep = tuple(a for a in self.plan.assignments if a.role != "data")
        new = tuple(assignments)
        for a in new:
            if a.role != "data":
                raise ParameterError(f"expected data assignments, got role {a.role!r}")
        return replace(self, plan=ChannelPlan(assignments=keep + new))


class _Section:
    """A TOML table wrapper that tracks which keys were consumed."""

    def __init__(self, data: Mapping[str, Any], path: str, errors: list[str]) -> None:
        self.data = data
        self.path = path
        self.errors = errors
        self.seen: set[str] = set()

    def take(self, key: str, default: Any = None, required: bool = False) -> Any:
        self.seen.add(key)
        if key in self.data:
            return self.data[key]
        if required:
            self.errors.append(f"{self.path}: missing required key '{key}'")
        return default

    def number(self, key: str, default: float | None = None, required: bool = False) -> Any:
        value = self.take(key, default, required)
        if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float))):
            self.errors.append(f"{self.path}.{key}: expected a number, got {value!r}")
            return default
        return value

    def integer(self, key: str, default: int | None = None, required: bool = False) -> Any:
        value = self.take(key, default, required)
        if value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            self.errors.append(f"{self.path}.{key}: expected an integer, got {value!r}")
            return default
        return value

    def text(self, key: str, default: str | None = None, required: bool = False) -> Any:
        value = self.take(key, default, required)
        if value is not None and not isinstance(value, str):
            self.errors.append(f"{self.path}.{key}: expected a string, got {value!r}")
            return default
        return value

    def table(self, key: str) -> "_Section | None":
        self.seen.add(key)
        value = self.data.get(key)
        if value is None:
            return None
        if not isinstance(value, dict):
            self.errors.append(f"{self.path}.{key}: expected a table")
            return None
        return _Section(value, f"{self.path}.{key}", self.errors)

    def tables(self, key: str) -> "list[_Section]":
        self.seen.add(key)
        value = self.data.get(key)
        if value is None:
            return []
        if not isinstance(value, list) or any(not isinstance(v, dict) for v in value):
            self.errors.append(f"{self.path}.{key}: expected an array of tables")
            return []
        return [
            _Section(v, f"{self.path}.{key}[{i}]", self.errors)
            for i, v in enumerate(value)
        ]

    def finish(self) -> None:
        unknown = sorted(set(self.data) - self.seen)
        for key in unknown:
            self.errors.append(f"{self.path}: unknown key '{key}'")


def _build(errors: list[str], factory: Any, **kwargs: Any) -> Any:
    """Construct a component, folding its validation error into the list."""
    try:
        return factory(**kwargs)
    except ParameterError as exc:
        errors.append(str(exc))
        return None


def parse_scenario(data: Mapping[str, Any], name: str) -> Scenario:
    """Validate a parsed TOML document into a Scenario.

    Collects every problem it can find and raises one ScenarioError listing
    all of them, so a bad file is fixed in one round trip.
    """
    errors: list[str] = []
    root = _Section(data, "scenario", errors)

    version = root.integer("schema_version", required=True)
    if version is not None and version != SCHEMA_VERSION:
        errors.append(f"scenario: unsupported schema_version {version}, expected {SCHEMA_VERSION}")
    name = root.text("name", name) or name
    seed = root.integer("seed", 1)
    convention = root.text("loss_convention", "end_to_end")
    if convention not in _CONVENTIONS:
        errors.append(f"scenario.loss_convention: must be one of {_CONVENTIONS}, got {convention!r}")
        convention = "end_to_end"

    fiber_sec = root.table("fiber")
    fiber = None
    if fiber_sec is None:
        errors.append("scenario: missing required section [fiber]")
    else:
        fiber = _build(
            errors,
            FiberSpec,
            length_km=fiber_sec.number("length_km", required=True) or 1.0,
            attenuation_db_per_km=fiber_sec.number("attenuation_db_per_km", 0.2),
        )
        fiber_sec.finish()

    quantum_sec = root.table("quantum")
    quantum_mux_db = 1.2
    assignments: list[ChannelAssignment] = []
    if quantum_sec is None:
        errors.append("scenario: missing required section [quantum]")
    else:
        q_index = quantum_sec.integer("channel", required=True)
        quantum_mux_db = quantum_sec.number("mux_loss_db", 1.2)
        quantum_sec.finish()
        if q_index is not None:
            channel = _build(errors, ItuChannel, index=q_index)
            if channel is not None:
                q = _build(errors, ChannelAssignment, channel=channel, role="quantum")
                if q is not None:
                    assignments.append(q)

    clock_sec = root.table("clock")
    if clock_sec is not None:
        c_index = clock_sec.integer("channel", required=True)
        launch = clock_sec.number("launch_dbm")
        direction = clock_sec.text("direction", "co")
        mux_db = clock_sec.number("mux_loss_db", 1.2)
        demux_db = clock_sec.number("demux_loss_db", 1.2)
        clock_sec.finish()
        if c_index is not None:
            channel = _build(errors, ItuChannel, index=c_index)
            if channel is not None:
                c = _build(
                    errors,
                    ChannelAssignment,
                    channel=channel,
                    role="clock",
                    launch_dbm=launch,
                    direction=direction,
                    mux_loss_db=mux_db,
                    demux_loss_db=demux_db,
                )
                if c is not None:
                    assignments.append(c)

    for sec in root.tables("data"):
        d_index = sec.integer("channel", required=True)
        launch = sec.number("launch_dbm")
        direction = sec.text("direction", "co")
        mux_db = sec.number("mux_loss_db", 1.2)
        demux_db = sec.number("demux_loss_db", 1.2)
        sec.finish()
        if d_index is None:
            continue
        channel = _build(errors, ItuChannel, index=d_index)
        if channel is None:
            continue
        d = _build(
            errors,
            ChannelAssignment,
            channel=channel,
            role="data",
            launch_dbm=launch,
            direction=direction,
            mux_loss_db=mux_db,
            demux_loss_db=demux_db,
        )
        if d is not None:
            assignments.append(d)

    plan = _build(errors, ChannelPlan, assignments=tuple(assignments)) if assignments else None
    if plan is None and not errors:
        errors.append("scenario: no channel assignments")

    policy_sec = root.table("policy")
    policy = LaunchPolicy()
    if policy_sec is not None:
        kind = policy_sec.text("kind", "adapted")
        fixed = policy_sec.number("fixed_dbm")
        margin = policy_sec.number("margin_db", 0.0)
        policy_sec.finish()
        built = _build(errors, LaunchPolicy, kind=kind, fixed_dbm=fixed, margin_db=margin)
        if built is not None:
            policy = built

    trx_sec = root.table("transceiver")
    transceiver = TransceiverSpec()
    if trx_sec is not None:
        built = _build(
            errors,
            TransceiverSpec,
            bitrate_gbps=trx_sec.number("bitrate_gbps", 10.0),
            sensitivity_dbm=trx_sec.number("sensitivity_dbm", -27.0),
            max_launch_dbm=trx_sec.number("max_launch_dbm", 5.0),
            ber_threshold=trx_sec.number("ber_threshold", 1.0e-12),
        )
        trx_sec.finish()
        if built is not None:
            transceiver = built

    gate_sec = root.table("gate")
    gate = TemporalGate(window_ps=100.0, clock_ghz=1.0)
    if gate_sec is not None:
        built = _build(
            errors,
            TemporalGate,
            window_ps=gate_sec.number("window_ps", 100.0),
            clock_ghz=gate_sec.number("clock_ghz", 1.0),
        )
        gate_sec.finish()
        if built is not None:
            gate = built

    det_sec = root.table("detector")
    det_kwargs: dict[str, Any] = {"gate": gate}
    if det_sec is not None:
        det_kwargs.update(
            efficiency=det_sec.number("efficiency", 0.20),
            dark_rate_hz=det_sec.number("dark_rate_hz", 1.0e3),
            afterpulse=det_sec.number("afterpulse", 0.04),
        )
        det_sec.finish()
    detector = _build(errors, DetectorSpec, **det_kwargs) or DetectorSpec(gate=gate)

    proto_sec = root.table("protocol")
    proto_kwargs: dict[str, Any] = {"clock_ghz": gate.clock_ghz}
    if proto_sec is not None:
        for key, default in (
            ("mu", 0.5),
            ("nu1", 0.1),
            ("nu2", 0.0007),
            ("p_mu", 0.7),
            ("p_nu1", 0.2),
            ("p_nu2", 0.1),
            ("pz_sender", 0.9),
            ("pz_receiver", 0.9),
            ("f_ec", 1.15),
            ("e_det", 0.01),
            ("epsilon", 1.0e-10),
        ):
            proto_kwargs[key] = proto_sec.number(key, default)
        session = proto_sec.take("session_s", 1200.0)
        if session is not None and (isinstance(session, bool) or not isinstance(session, (int, float))):
            errors.append(f"scenario.protocol.session_s: expected a number, got {session!r}")
            session = 1200.0
        proto_kwargs["session_s"] = session
        proto_sec.finish()
    protocol = _build(errors, ProtocolParams, **proto_kwargs) or ProtocolParams(
        clock_ghz=gate.clock_ghz
    )

    quantum_channel = None
    if plan is not None:
        quantum_channel = plan.quantum.channel
    filters_sec = root.table("receiver")
    chain = None
    if filters_sec is None:
        errors.append("scenario: missing required section [receiver]")
    elif quantum_channel is not None:
        demux_fwhm = filters_sec.number("demux_fwhm_ghz", 70.0)
        demux_ins = filters_sec.number("demux_insertion_db", 1.2)
        stages = [
            _build(
                errors,
                SpectralFilter,
                center=quantum_channel,
                fwhm_ghz=demux_fwhm,
                insertion_db=demux_ins,
            )
        ]
        extra = filters_sec.table("extra_filter")
        if extra is not None:
            stages.append(
                _build(
                    errors,
                    SpectralFilter,
                    center=quantum_channel,
                    fwhm_ghz=extra.number("fwhm_ghz", required=True) or 15.0,
                    insertion_db=extra.number("insertion_db", 0.0),
                )
            )
            extra.finish()
        filters_sec.finish()
        if all(s is not None for s in stages):
            chain = _build(errors, FilterChain, filters=tuple(stages), gate=gate)

    raman_sec = root.table("raman")
    raman = None
    if raman_sec is None:
        errors.append("scenario: missing required section [raman] (the scale has no default)")
    else:
        scale = raman_sec.number("scale", required=True)
        table = raman_sec.text("profile_table")
        raman_sec.finish()
        if scale is not None:
            if table is None:
                raman = _build(errors, RamanProfile.with_default_shape, scale=scale)
            else:
                path = Path(table)
                if not path.exists():
                    errors.append(f"scenario.raman.profile_table: no such file {table!r}")
                else:
                    try:
                        raman = RamanProfile.from_table(scale, path)
                    except (ParameterError, ValueError) as exc:
                        errors.append(f"scenario.raman.profile_table: {exc}")

    iso_sec = root.table("isolation")
    isolation = DEFAULT_ISOLATION
    if iso_sec is not None:
        built = _build(
            errors,
            IsolationModel,
            adjacent_db=iso_sec.number("adjacent_db", 43.0),
            non_adjacent_db=iso_sec.number("non_adjacent_db", 77.0),
            filter_stopband_db=iso_sec.number("filter_stopband_db", 30.0),
        )
        iso_sec.finish()
        if built is not None:
            isolation = built

    sweep_sec = root.table("sweep")
    axis: str = "none"
    values: tuple[float, ...] = ()
    if sweep_sec is not None:
        axis = sweep_sec.text("axis", required=True) or "none"
        raw_values = sweep_sec.take("values", ())
        sweep_sec.finish()
        if axis not in _AXES:
            errors.append(f"scenario.sweep.axis: must be one of {_AXES}, got {axis!r}")
            axis = "none"
        if not isinstance(raw_values, (list, tuple)) or any(
            isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw_values
        ):
            errors.append("scenario.sweep.values: expected an array of numbers")
        else:
            values = tuple(float(v) for v in raw_values)

    calib_sec = root.table("calibration")
    calibration = None
    if calib_sec is not None:
        free = calib_sec.take("free", ())
        anchors: list[CalibrationAnchorSpec] = []
        for a_sec in calib_sec.tables("anchor"):
            metric = a_sec.text("metric", "secure_bps")
            if metric not in _METRICS:
                errors.append(
                    f"{a_sec.path}.metric: must be one of {_METRICS}, got {metric!r}"
                )
                metric = "secure_bps"
            anchors.append(
                CalibrationAnchorSpec(
                    axis_value=a_sec.number("axis_value", required=True) or 0.0,
                    metric=metric,
                    target=a_sec.number("target", required=True) or 1.0,
                    weight=a_sec.number("weight", 1.0),
                )
            )
            a_sec.finish()
        calib_sec.finish()
        if not isinstance(free, (list, tuple)) or any(not isinstance(f, str) for f in free):
            errors.append("scenario.calibration.free: expected an array of parameter names")
            free = ()
        calibration = CalibrationSpec(free=tuple(free), anchors=tuple(anchors))

    root.finish()

    if errors or fiber is None or plan is None or chain is None or raman is None:
        if not errors:
            errors.append("scenario: incomplete configuration")
        exc = ScenarioError("; ".join(errors))
        exc.errors = tuple(errors)  # type: ignore[attr-defined]
        raise exc

    try:
        return Scenario(
            name=name,
            fiber=fiber,
            plan=plan,
            quantum_mux_loss_db=quantum_mux_db,
            chain=chain,
            detector=detector,
            protocol=protocol,
            transceiver=transceiver,
            policy=policy,
            raman=raman,
            isolation=isolation,
            sweep_axis=axis,  # type: ignore[arg-type]
            sweep_values=values,
            loss_convention=convention,  # type: ignore[arg-type]
            seed=seed if seed is not None else 1,
            calibration=calibration,
        )
    except ParameterError as exc:
        raise ScenarioError(str(exc)) from exc


def load_scenario(path: str | Path) -> Scenario:
    """Load and validate a scenario file."""
    path = Path(path)
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
    return parse_scenario(data, name=path.stem)


def bundled_scenario_names() -> tuple[str, ...]:
    """Names of the scenario files shipped with the package."""
    from importlib import resources

    root = resources.files("qkdmux") / "scenarios"
    return tuple(
        sorted(p.name.removesuffix(".scenario") for p in root.iterdir() if p.name.endswith(".scenario"))
    )


def bundled_scenario(name: str) -> Scenario:
    """Load one of the scenarios shipped with the package."""
    from importlib import resources

    candidate = resources.files("qkdmux") / "scenarios" / f"{name}.scenario"
    if not candidate.is_file():
        raise ScenarioError(
            f"no bundled scenario {name!r}; available: {', '.join(bundled_scenario_names())}"
        )
    data = tomllib.loads(candidate.read_text())
    return parse_scenario(data, name=name)


def resolve_scenario(ref: str) -> Scenario:
    """Load a scenario by bundled name or filesystem path."""
    path = Path(ref)
    if path.exists():
        return load_scenario(path)
    if ref == path.stem and not path.is_absolute():
        try:
            return bundled_scenario(ref)
        except ScenarioError:
            pass
    raise ScenarioError(
        f"{ref!r} is neither a scenario file nor a bundled scenario name "
        f"(bundled: {', '.join(bundled_scenario_names())})"
    )
