"""Command-line front end: ``tunnelkit {delay,hartman,table,simulate}``.

Exit codes: 0 success, 2 usage or invalid configuration, 3 a numerical or
physical guard tripped (opaque barrier, resolution, wall reflections).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from contextlib import contextmanager
from importlib import resources
from pathlib import Path

import numpy as np

from . import universal
from ._io import dumps, fmt
from .domain import (
    M_E,
    NM,
    C,
    ConfigurationError,
    DielectricStack,
    DomainError,
    EvanescentGuide,
    FtirGap,
    Layer,
    NumericalError,
    OpaqueBarrierError,
    RectangularBarrier,
    energy_to_omega,
)
from .phasetime import hartman_curve, phase_time

EXIT_OK, EXIT_USAGE, EXIT_GUARD = 0, 2, 3


class UsageError(Exception):
    pass


class GuardError(Exception):
    pass


@contextmanager
def _output(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _layer(text: str) -> Layer:
    try:
        n, t = text.split(":")
        return Layer(float(n), float(t) * NM)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"layer must be INDEX:THICKNESS_NM, got {text!r}") from exc


def _add_model_args(p: argparse.ArgumentParser, model: str) -> None:
    if model == "rect":
        p.add_argument("--e-ev", type=float, required=True, help="particle energy (eV)")
        p.add_argument("--v0-ev", type=float, required=True, help="barrier height (eV)")
        p.add_argument("--mass-kg", type=float, default=M_E)
    elif model == "guide":
        p.add_argument("--freq-ghz", type=float, required=True)
        p.add_argument("--cutoff-ghz", type=float, required=True)
    elif model == "ftir":
        p.add_argument("--wavelength-nm", type=float, required=True, help="vacuum wavelength")
        p.add_argument("--prism-index", type=float, required=True)
        p.add_argument("--angle-deg", type=float, required=True)
        p.add_argument("--polarization", choices=("s", "p"), default="s")
    elif model == "stack":
        p.add_argument("--wavelength-nm", type=float, required=True, help="vacuum wavelength")
        p.add_argument("--ambient-index", type=float, default=1.0)
        p.add_argument("--layer", type=_layer, action="append", default=[],
                       metavar="INDEX:THICKNESS_NM", help="repeat, first layer first")


def _model(args, length: float | None):
    """(model, omega) from parsed flags; ``length`` in metres overrides the flag."""
    if args.model == "rect":
        width = args.width_nm * NM if length is None else length
        return (RectangularBarrier(args.v0_ev, width, args.mass_kg), energy_to_omega(args.e_ev))
    if args.model == "guide":
        ln = args.length_mm * 1e-3 if length is None else length
        return EvanescentGuide(args.cutoff_ghz * 1e9, ln), 2 * math.pi * args.freq_ghz * 1e9
    if args.model == "ftir":
        gap = args.gap_nm * NM if length is None else length
        model = FtirGap(args.prism_index, math.radians(args.angle_deg), gap, args.polarization)
        return model, 2 * math.pi * C / (args.wavelength_nm * NM)
    stack = DielectricStack(tuple(args.layer), args.ambient_index)
    return stack, 2 * math.pi * C / (args.wavelength_nm * NM)


_LENGTH_FLAG = {"rect": ("--width-nm", NM), "guide": ("--length-mm", 1e-3), "ftir": ("--gap-nm", NM)}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tunnelkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    delay = sub.add_parser("delay", help="phase time of one barrier")
    dsub = delay.add_subparsers(dest="model", required=True)
    for model in ("rect", "guide", "ftir", "stack"):
        p = dsub.add_parser(model)
        _add_model_args(p, model)
        if model in _LENGTH_FLAG:
            p.add_argument(_LENGTH_FLAG[model][0], type=float, required=True)
        p.add_argument("--relative", action="store_true", help="subtract the free-flight time")
        p.add_argument("--delta", type=float, default=1e-5, help="relative frequency step")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", type=Path)

    hartman = sub.add_parser("hartman", help="phase time against barrier length")
    hsub = hartman.add_subparsers(dest="model", required=True)
    for model in ("rect", "guide", "ftir"):
        p = hsub.add_parser(model)
        _add_model_args(p, model)
        unit = _LENGTH_FLAG[model][0].rsplit("-", 1)[1]
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument(f"--lengths-{unit}", type=float, nargs="+", dest="lengths")
        g.add_argument(f"--range-{unit}", type=float, nargs=3, dest="range",
                       metavar=("START", "STOP", "NUM"))
        p.add_argument("--relative", action="store_true")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", type=Path)

    table = sub.add_parser("table", help="reference table with universality ratios")
    table.add_argument("--format", choices=("text", "json"), default="text")
    table.add_argument("--out", type=Path)

    sim = sub.add_parser("simulate", help="time-domain wave-packet traversal")
    sim.add_argument("scenario", help="scenario JSON path or the name of a bundled scenario")
    sim.add_argument("--trajectory-csv", type=Path, help="barrier-run trajectory")
    sim.add_argument("--arrival-json", type=Path, help="arrival records of both runs")
    sim.add_argument("--format", choices=("json", "text"), default="json")
    sim.add_argument("--out", type=Path)
    return parser


# -- commands -----------------------------------------------------------------

def cmd_delay(args) -> int:
    try:
        model, omega = _model(args, None)
        result = phase_time(model, omega, args.delta, relative_to_free_flight=args.relative)
    except (DomainError, ConfigurationError) as exc:
        raise UsageError(str(exc)) from exc
    except (OpaqueBarrierError, NumericalError) as exc:
        raise GuardError(str(exc)) from exc
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(dumps(result.to_dict()))
        else:
            fh.write(f"tau_s {fmt(result.value)}\nmethod {result.method}\n")
    return EXIT_OK


def cmd_hartman(args) -> int:
    if args.range is not None:
        start, stop, num = args.range
        if num != int(num):
            raise UsageError("NUM must be an integer")
        lengths = np.linspace(start, stop, int(num))
    else:
        lengths = np.asarray(args.lengths)
    if len(lengths) < 3:
        raise UsageError("hartman needs at least 3 lengths")
    scale = _LENGTH_FLAG[args.model][1]
    try:
        _, omega = _model(args, 0.0)
        curve = hartman_curve(
            lambda L: _model(args, L)[0], lengths * scale, omega,
            relative_to_free_flight=args.relative,
        )
    except (DomainError, ConfigurationError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    valid = sum(p.ok for p in curve.points)
    with _output(args.out) as fh:
        if args.format == "csv":
            fh.write("length_m,tau_s\n")
            for p in curve.points:
                fh.write(f"{fmt(p.length)},{fmt(p.delay.value) if p.ok else ''}\n")
            sat = "" if curve.saturation is None else fmt(curve.saturation)
            fh.write(f"saturation_diagnostic,{sat}\n")
        else:
            fh.write(dumps({
                "points": [
                    {"length_m": p.length, "tau_s": p.delay.value if p.ok else None,
                     "kappa_length": p.kappa_length, "error": p.error}
                    for p in curve.points
                ],
                "saturation_diagnostic": curve.saturation,
            }))
    if valid < 2:
        raise GuardError(f"only {valid} valid point(s) in the scan")
    return EXIT_OK


def render_table(report: universal.ComparisonReport) -> str:
    out = io.StringIO()
    head = ("kind", "reference", "tau_s", "period_T_s", "tau_A_s", "tau/T", "tau/tau_A", "log10(tau/T)", "ok")
    rows = [
        (
            e.record.barrier_kind, e.record.reference, fmt(e.record.tau_measured),
            fmt(e.record.period_T), fmt(e.record.tau_A), f"{e.ratio_T:.4f}",
            f"{e.ratio_A:.4f}", f"{e.log10_T:+.4f}", "yes" if e.within_T else "no",
        )
        for e in report.entries
    ]
    widths = [max(len(r[i]) for r in [head, *rows]) for i in range(len(head))]
    for r in [head, *rows]:
        out.write("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    e, v0 = universal.IONIZATION_ENERGY, universal.IONIZATION_BARRIER
    ratio = universal.tau_A_ratio_form(e, v0)
    sqrt = universal.tau_A_sqrt_form(e, v0)
    out.write(
        f"\nionization (E = {e} eV, V0 = {v0} eV): "
        f"tau_A ratio form = {ratio / 1e-18:.2f} as, sqrt form = {sqrt / 1e-18:.1f} as, "
        f"sqrt/ratio = {sqrt / ratio:.3f}\n"
    )
    out.write(f"threshold |log10(tau/T)| < {report.threshold}\n{report.verdict}\n")
    return out.getvalue()


def cmd_table(args) -> int:
    report = universal.compare(universal.builtin_table())
    with _output(args.out) as fh:
        if args.format == "json":
            data = report.to_dict()
            e, v0 = universal.IONIZATION_ENERGY, universal.IONIZATION_BARRIER
            data["ionization_tau_A"] = {
                "energy_ev": e,
                "v0_ev": v0,
                "ratio_form_s": universal.tau_A_ratio_form(e, v0),
                "sqrt_form_s": universal.tau_A_sqrt_form(e, v0),
            }
            fh.write(dumps(data))
        else:
            fh.write(render_table(report))
    return EXIT_OK


def _resolve_scenario(name: str):
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("tunnelkit").joinpath("scenarios", path.name)
    if not bundled.name.endswith(".json"):
        bundled = resources.files("tunnelkit").joinpath("scenarios", path.name + ".json")
    if bundled.is_file():
        return bundled
    raise UsageError(f"scenario not found: {name}")


def cmd_simulate(args) -> int:
    from .tdse import TraversalScenario, simulate_traversal

    src = _resolve_scenario(args.scenario)
    try:
        scenario = TraversalScenario.from_json(json.loads(src.read_text()))
    except json.JSONDecodeError as exc:
        raise UsageError(f"scenario is not valid JSON: {exc}") from exc
    except (ConfigurationError, DomainError) as exc:
        raise UsageError(str(exc)) from exc
    try:
        run = simulate_traversal(scenario)
        predicted = phase_time(scenario.barrier, _packet_omega(scenario))
    except (ConfigurationError, OpaqueBarrierError, NumericalError) as exc:
        raise GuardError(str(exc)) from exc

    if args.trajectory_csv:
        with open(args.trajectory_csv, "w", newline="") as fh:
            run.barrier_trajectory.write_csv(fh)
    if args.arrival_json:
        with open(args.arrival_json, "w") as fh:
            fh.write(dumps({"barrier": run.barrier_arrival.to_dict(), "free": run.free_arrival.to_dict()}))
    tau = run.delay.value
    summary = {
        "tau_sim_s": tau,
        "tau_phase_s": predicted.value,
        "ratio": tau / predicted.value,
        "estimator": run.delay.metadata["estimator"],
        "peak_tau_s": run.delay.metadata["peak_tau_s"],
        "centroid_tau_s": run.delay.metadata["centroid_tau_s"],
        "packet_breakup": run.delay.metadata["packet_breakup"],
        "transmitted_probability": run.barrier_arrival.transmitted_probability,
        "norm_drift": run.delay.metadata["norm_drift"],
    }
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(dumps(summary))
        else:
            for k, v in summary.items():
                fh.write(f"{k} {fmt(v) if isinstance(v, float) else str(v).lower()}\n")
    return EXIT_OK


def _packet_omega(scenario) -> float:
    from .domain import HBAR

    return scenario.packet_energy() / HBAR


COMMANDS = {"delay": cmd_delay, "hartman": cmd_hartman, "table": cmd_table, "simulate": cmd_simulate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"tunnelkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GuardError as exc:
        print(f"tunnelkit: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
