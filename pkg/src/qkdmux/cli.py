"""Command-line entry point.

Subcommands: simulate (single point), sweep (full axis), calibrate (fit the
scenario's declared anchors), plan (provision launch powers), audit-tbp
(time-bandwidth budget of the receiver). Exit codes: 0 on success, 2 on
validation problems, 3 when calibration cannot reach its anchors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .calibration import anchors_from_spec, calibrate
from .errors import CalibrationError, ParameterError
from .filterchain import ideal_fwhm_ghz, tbp_audit
from .planner import combined_launch_dbm, provision, validate_plan
from .scenario import Scenario, bundled_scenario_names, resolve_scenario
from .sweep import emit, evaluate_point, run_sweep, SweepTable


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qkdmux",
        description=(
            "Simulate and plan quantum key distribution alongside 10 Gb/s "
            "data channels on a shared fiber."
        ),
    )
    parser.add_argument(
        "-s",
        "--scenario",
        required=True,
        help=(
            "scenario file path, or the name of a bundled scenario "
            f"({', '.join(bundled_scenario_names())})"
        ),
    )
    parser.add_argument(
        "-o",
        "--output-dir",
        default=None,
        help="directory for emitted files (default: write to stdout)",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    parser.add_argument(
        "-j",
        "--jobs",
        type=int,
        default=1,
        help="sweep points evaluated concurrently (default 1)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="evaluate the scenario at a single point")
    p_sim.add_argument(
        "--format", choices=("csv", "report"), default="report", help="output format"
    )

    p_sweep = sub.add_parser("sweep", help="evaluate every point on the sweep axis")
    p_sweep.add_argument(
        "--format", choices=("csv", "report"), default="csv", help="output format"
    )

    p_cal = sub.add_parser("calibrate", help="fit free parameters to declared anchors")
    p_cal.add_argument(
        "--free",
        default=None,
        help="comma-separated parameter names (default: the scenario's declaration)",
    )

    sub.add_parser("plan", help="provision launch powers and validate the plan")
    sub.add_parser("audit-tbp", help="report the receiver's time-bandwidth budget")
    return parser


def _write(text: str, out_dir: str | None, filename: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
        return
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / filename
    target.write_text(text)
    print(f"wrote {target}")


def _cmd_simulate(scenario: Scenario, args: argparse.Namespace) -> int:
    single = scenario.without_sweep()
    table = SweepTable(scenario=single, rows=(evaluate_point(single, None),))
    _write(emit(table, args.format), args.output_dir, f"{scenario.name}-point.csv")
    return 0


def _cmd_sweep(scenario: Scenario, args: argparse.Namespace) -> int:
    table = run_sweep(scenario, jobs=max(1, args.jobs))
    name = f"{scenario.name}-{scenario.sweep_axis}.csv"
    _write(emit(table, args.format), args.output_dir, name)
    return 0


def _cmd_calibrate(scenario: Scenario, args: argparse.Namespace) -> int:
    anchors = anchors_from_spec(scenario)
    if args.free is not None:
        free = tuple(name.strip() for name in args.free.split(",") if name.strip())
    elif scenario.calibration is not None and scenario.calibration.free:
        free = scenario.calibration.free
    else:
        free = ("raman_scale", "e_det")
    result = calibrate(anchors, free=free)
    lines = [f"converged: {'yes' if result.converged else 'NO'}"]
    for name, value in result.params:
        lines.append(f"{name}: {value:.9g}")
    for anchor, residual in zip(anchors, result.residuals):
        lines.append(
            f"anchor {anchor.metric} @ {anchor.axis_value:g} -> "
            f"target {anchor.target:.6g}, residual {100.0 * residual:+.2f}%"
        )
    lines.append(f"objective: {result.objective:.6g}")
    lines.append(f"iterations: {result.iterations}")
    _write("\n".join(lines) + "\n", args.output_dir, f"{scenario.name}-calibration.txt")
    return 0


def _cmd_plan(scenario: Scenario, args: argparse.Namespace) -> int:
    powered = provision(
        scenario.plan, scenario.fiber, scenario.transceiver, scenario.policy
    )
    checked = validate_plan(powered, isolation=scenario.isolation)
    lines = []
    for a in powered.assignments:
        power = "dark" if a.launch_dbm is None else f"{a.launch_dbm:+.2f} dBm"
        tail = "" if a.role == "quantum" else f" {a.direction} {power}"
        lines.append(
            f"channel {a.channel.index} ({a.channel.wavelength_nm:.2f} nm): "
            f"{a.role}{tail}"
        )
    if powered.data_channels:
        lines.append(f"combined data launch: {combined_launch_dbm(powered):+.2f} dBm")
    if checked.warnings:
        lines.extend(f"warning: {w}" for w in checked.warnings)
    else:
        lines.append("no warnings")
    _write("\n".join(lines) + "\n", args.output_dir, f"{scenario.name}-plan.txt")
    return 0


def _cmd_audit_tbp(scenario: Scenario, args: argparse.Namespace) -> int:
    audit = tbp_audit(scenario.chain)
    gate = scenario.chain.gate
    lines = [
        f"narrowest filter: {scenario.chain.net_fwhm_ghz:g} GHz FWHM",
        f"gate window: {gate.window_ps:g} ps at {gate.clock_ghz:g} GHz",
        f"time-bandwidth product: {audit.tbp:.6g}",
        f"transform limit: {audit.limit:.6g}",
        f"ratio to limit: {audit.ratio:.4g}x",
        f"at limit: {'yes' if audit.at_limit else 'no'}",
        f"transform-limited width for this window: "
        f"{ideal_fwhm_ghz(gate.window_ps):.4g} GHz",
        f"temporal acceptance: {gate.acceptance_db:.1f} dB",
    ]
    _write("\n".join(lines) + "\n", args.output_dir, f"{scenario.name}-tbp.txt")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "calibrate": _cmd_calibrate,
    "plan": _cmd_plan,
    "audit-tbp": _cmd_audit_tbp,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        scenario = resolve_scenario(args.scenario)
        if args.seed is not None:
            from dataclasses import replace

            scenario = replace(scenario, seed=args.seed)
        return _COMMANDS[args.command](scenario, args)
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
