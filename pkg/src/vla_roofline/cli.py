"""Command-line surface: analyze deployments, sweep design axes, reproduce
the bundled reference tables, and list the available presets.

Output is deterministic (no timestamps, stable ordering) so runs can be
diffed.  Formatting follows the reference tables: milliseconds with two
decimals, Hz with one, memory in GiB printed as "GB".  Exit codes: 0 for
success (including infeasible-but-valid N/A results), 1 for usage or
configuration errors, 2 when a reproduce run misses its tolerances.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace
from itertools import product
from pathlib import Path
from typing import Optional, Sequence

from . import golden
from .configio import PresetLibrary, load_presets
from .opgraph import PHASES
from .roofline import COMPUTE_BOUND, GIB
from .scenarios import (
    DECODING_VARIANTS,
    Placement,
    ScenarioResult,
    async_scenario,
    decoding_variant_spec,
    dual_system_scenario,
    sync_scenario,
)
from .workload import VlaModelSpec

FORMATS = ("table", "csv", "json")
PLACEMENTS = ("on-device", "edge-server", "cloud-server", "collaborative")
REPRODUCE_IDS = ("T1", "T3", "T4", "T5", "T6", "T8", "T9",
                 "scaling", "collab", "all")
# "scaling" is an alias for T5, so "all" runs each underlying table once.
_ALL_TABLES = ("T1", "T3", "T4", "T5", "T6", "T8", "T9", "collab")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; we reserve 2 for golden
    failures, so usage errors are remapped to 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated ints, got {text!r}")


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in text.split(",") if part.strip())


def build_parser() -> _Parser:
    parser = _Parser(
        prog="vla-roofline",
        description="Roofline-based latency/throughput model for "
                    "vision-language-action inference.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p):
        p.add_argument("--format", choices=FORMATS, default="table",
                       help="output format (default: table)")
        p.add_argument("--out", metavar="PATH",
                       help="write output to PATH instead of stdout")

    def add_placement_flags(p):
        p.add_argument("--model", default="pi0", help="model preset name")
        p.add_argument("--hw", default="b100",
                       help="serving accelerator preset")
        p.add_argument("--placement", choices=PLACEMENTS, default="on-device")
        p.add_argument("--net", help="access network preset (server placements)")
        p.add_argument("--cloud-net", help="second hop for cloud-server")
        p.add_argument("--device-hw",
                       help="robot-side accelerator (collaborative)")

    analyze = sub.add_parser(
        "analyze", help="evaluate one model/placement combination")
    add_placement_flags(analyze)
    analyze.add_argument("--chunk", type=int, help="action chunk size")
    analyze.add_argument("--steps", type=int, help="denoising steps")
    analyze.add_argument("--dof", type=int, help="action degrees of freedom")
    analyze.add_argument("--decoding", choices=DECODING_VARIANTS,
                         help="decoding strategy override")
    analyze.add_argument("--context-steps", type=int,
                         help="timesteps of cached camera history")
    analyze.add_argument("--s2-cap", type=float,
                         help="dual-system mode: System-2 rate cap in Hz")
    analyze.add_argument("--async", dest="use_async", action="store_true",
                         help="pipelined serving rate instead of synchronous")
    add_output_flags(analyze)

    sweep = sub.add_parser(
        "sweep", help="evaluate a cartesian grid of design choices")
    add_placement_flags(sweep)
    sweep.add_argument("--chunk", type=_int_list, help="e.g. 5,10,50,250")
    sweep.add_argument("--steps", type=_int_list, help="e.g. 1,10,50")
    sweep.add_argument("--dof", type=_int_list, help="e.g. 7,14,40")
    sweep.add_argument("--decoding", type=_str_list,
                       help=f"subset of {','.join(DECODING_VARIANTS)}")
    sweep.add_argument("--context-steps", type=_int_list,
                       help="e.g. 1,10,100,1000")
    add_output_flags(sweep)

    reproduce = sub.add_parser(
        "reproduce", help="compare modeled tables against bundled references")
    reproduce.add_argument("table", choices=REPRODUCE_IDS)
    add_output_flags(reproduce)

    listing = sub.add_parser("list-presets", help="show addressable presets")
    add_output_flags(listing)

    return parser


# ---------------------------------------------------------------------------
# Record building and rendering
# ---------------------------------------------------------------------------

_DECIMALS = {"_ms": 2, "_hz": 1, "_gb": 2, "_oi": 1}


def _decimals_for(key: str) -> Optional[int]:
    for suffix, digits in _DECIMALS.items():
        if key.endswith(suffix):
            return digits
    return None


def _format_value(key: str, value) -> str:
    if value is None:
        return "N/A"
    digits = _decimals_for(key)
    if digits is not None and isinstance(value, (int, float)):
        return f"{value:.{digits}f}"
    return str(value)


def _json_value(key: str, value):
    digits = _decimals_for(key)
    if digits is not None and isinstance(value, (int, float)):
        return round(value, digits)
    return value


def _render_record(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({k: _json_value(k, v) for k, v in record.items()},
                          indent=2)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in record.items():
            writer.writerow([key, _format_value(key, value)])
        return buf.getvalue().rstrip("\n")
    width = max(len(key) for key in record)
    return "\n".join(f"{key.ljust(width)}  {_format_value(key, value)}"
                     for key, value in record.items())


def _render_rows(rows: list[dict], fmt: str) -> str:
    if not rows:
        return "" if fmt != "json" else "[]"
    columns = list(rows[0])
    if fmt == "json":
        return json.dumps(
            [{k: _json_value(k, row[k]) for k in columns} for row in rows],
            indent=2)
    cells = [[_format_value(col, row[col]) for col in columns] for row in rows]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(cells)
        return buf.getvalue().rstrip("\n")
    widths = [max(len(col), *(len(row[i]) for row in cells))
              for i, col in enumerate(columns)]
    lines = ["  ".join(col.ljust(w) for col, w in zip(columns, widths))]
    for row in cells:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines)


def _scenario_record(model_name: str, result: ScenarioResult) -> dict:
    record: dict = {
        "model": model_name,
        "placement": result.placement,
        "feasible": "yes" if result.feasible else "no",
    }
    for phase in PHASES:
        if phase in result.phase_latencies:
            record[f"{phase}_latency_ms"] = result.phase_latencies[phase] * 1e3
    for leg in sorted(result.network_latencies):
        record[f"{leg}_ms"] = result.network_latencies[leg] * 1e3
    record["e2e_latency_ms"] = (result.e2e_latency * 1e3
                                if result.e2e_latency is not None else None)
    record["sync_frequency_hz"] = result.sync_frequency
    if result.async_frequency is not None:
        record["async_frequency_hz"] = result.async_frequency
    for phase in PHASES:
        if phase in result.boundedness:
            bound = result.boundedness[phase]
            record[f"{phase}_bound"] = (
                "compute" if bound == COMPUTE_BOUND else "memory")
            record[f"{phase}_oi"] = result.operational_intensity[phase]
    record["footprint_gb"] = result.footprint_bytes / GIB
    for i, note in enumerate(result.notes, 1):
        record[f"note_{i}"] = note
    return record


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _configure_spec(base: VlaModelSpec, chunk: Optional[int],
                    steps: Optional[int], dof: Optional[int],
                    decoding: Optional[str]) -> VlaModelSpec:
    spec = base
    if chunk is not None:
        spec = replace(spec, chunk_size=chunk)
    if steps is not None:
        spec = replace(spec, denoise_steps=steps)
    if dof is not None:
        spec = replace(spec, action_dof=dof)
    if decoding is not None:
        spec = decoding_variant_spec(spec, decoding, spec.chunk_size,
                                     spec.action_dof)
    return spec


def _build_placement(args, lib: PresetLibrary, parser: _Parser) -> Placement:
    hw = lib.accelerator(args.hw)
    if args.placement == "on-device":
        return Placement.on_device(hw)
    if args.placement == "edge-server":
        if not args.net:
            parser.error("edge-server placement requires --net")
        return Placement.edge_server(hw, lib.network(args.net))
    if args.placement == "cloud-server":
        if not (args.net and args.cloud_net):
            parser.error("cloud-server placement requires --net and --cloud-net")
        return Placement.cloud_server(hw, lib.network(args.net),
                                      lib.network(args.cloud_net))
    if not (args.net and args.device_hw):
        parser.error("collaborative placement requires --net and --device-hw")
    return Placement.collaborative(lib.accelerator(args.device_hw), hw,
                                   lib.network(args.net))


def _run_analyze(args, lib: PresetLibrary, parser: _Parser) -> tuple[str, int]:
    spec = _configure_spec(lib.model(args.model), args.chunk, args.steps,
                           args.dof, args.decoding)
    placement = _build_placement(args, lib, parser)
    if args.s2_cap is not None:
        dual = dual_system_scenario(spec, placement, args.s2_cap)
        record = {
            "model": spec.name,
            "placement": dual.placement,
            "s2_cap_hz": dual.s2_cap,
            "feasible": "yes" if dual.feasible else "no",
            "s1_latency_ms": None if dual.t_s1 is None else dual.t_s1 * 1e3,
            "s2_latency_ms": None if dual.t_s2 is None else dual.t_s2 * 1e3,
            "sync_frequency_hz": dual.sync_frequency,
            "async_frequency_hz": dual.async_frequency,
        }
        for i, note in enumerate(dual.notes, 1):
            record[f"note_{i}"] = note
    elif args.use_async:
        record = _scenario_record(
            spec.name, async_scenario(spec, placement, args.context_steps))
    else:
        record = _scenario_record(
            spec.name, sync_scenario(spec, placement, args.context_steps))
    return _render_record(record, args.format), 0


def _run_sweep(args, lib: PresetLibrary, parser: _Parser) -> tuple[str, int]:
    base = lib.model(args.model)
    placement = _build_placement(args, lib, parser)
    # Axes iterate in lexicographic name order; values keep user order.
    axes = [(name, values) for name, values in sorted((
        ("chunk", args.chunk),
        ("context_steps", args.context_steps),
        ("decoding", args.decoding),
        ("dof", args.dof),
        ("steps", args.steps),
    )) if values is not None]
    rows = []
    for combo in product(*(values for _, values in axes)):
        point = dict(zip((name for name, _ in axes), combo))
        spec = _configure_spec(base, point.get("chunk"), point.get("steps"),
                               point.get("dof"), point.get("decoding"))
        result = sync_scenario(spec, placement,
                               context_timestep=point.get("context_steps"))
        row = dict(point)
        row["feasible"] = "yes" if result.feasible else "no"
        for phase in PHASES:
            key = f"{phase}_latency_ms"
            row[key] = (result.phase_latencies[phase] * 1e3
                        if phase in result.phase_latencies else None)
        row["e2e_latency_ms"] = (result.e2e_latency * 1e3
                                 if result.e2e_latency is not None else None)
        row["sync_frequency_hz"] = result.sync_frequency
        row["footprint_gb"] = result.footprint_bytes / GIB
        rows.append(row)
    return _render_rows(rows, args.format), 0


def _cell_modeled_text(cell: golden.GoldenCell) -> str:
    if cell.kind == golden.LABEL:
        return cell.modeled_text or ""
    if cell.modeled is None:
        return "N/A"
    digits = {"ms": 2, "Hz": 1, "GB": 2, "FLOPs/B": 1, "x": 2, "Gparams": 2}
    return f"{cell.modeled:.{digits.get(cell.unit, 2)}f}"


def _cell_reference_text(cell: golden.GoldenCell) -> str:
    if cell.kind == golden.LABEL:
        return cell.reference_text or ""
    return cell.reference if cell.reference is not None else "N/A"


def _cell_status(cell: golden.GoldenCell) -> str:
    return {True: "ok", False: "FAIL", None: "info"}[cell.passed]


def _cell_error_text(cell: golden.GoldenCell) -> str:
    rel = cell.relative_error
    return "" if rel is None else f"{rel * 100:+.1f}%"


def _run_reproduce(args, lib: PresetLibrary) -> tuple[str, int]:
    names = _ALL_TABLES if args.table == "all" else (args.table,)
    groups = [(name, golden.TABLES[name](lib)) for name in names]
    all_pass = all(golden.table_passed(cells) for _, cells in groups)

    if args.format == "json":
        payload = []
        for name, cells in groups:
            payload.append({
                "table": name,
                "passed": golden.table_passed(cells),
                "cells": [{
                    "label": c.label,
                    "unit": c.unit,
                    "modeled": _cell_modeled_text(c),
                    "reference": _cell_reference_text(c),
                    "error": _cell_error_text(c),
                    "status": _cell_status(c),
                } for c in cells],
            })
        return json.dumps(payload, indent=2), 0 if all_pass else 2

    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["table", "label", "unit", "modeled", "reference",
                         "error", "status"])
        for name, cells in groups:
            for c in cells:
                writer.writerow([name, c.label, c.unit, _cell_modeled_text(c),
                                 _cell_reference_text(c), _cell_error_text(c),
                                 _cell_status(c)])
        return buf.getvalue().rstrip("\n"), 0 if all_pass else 2

    lines = []
    for name, cells in groups:
        rows = [(c.label,
                 f"{_cell_modeled_text(c)} {c.unit}".rstrip(),
                 f"{_cell_reference_text(c)} {c.unit}".rstrip(),
                 _cell_error_text(c), _cell_status(c)) for c in cells]
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        for row in rows:
            lines.append("  ".join((
                name, row[0].ljust(widths[0]), row[1].rjust(widths[1]),
                row[2].rjust(widths[2]), row[3].rjust(widths[3]), row[4])))
        graded = [c for c in cells if c.passed is not None]
        failed = [c for c in graded if not c.passed]
        verdict = "PASS" if not failed else f"FAIL ({len(failed)} cell(s))"
        lines.append(f"{name}: {verdict} — {len(graded)} graded, "
                     f"{len(cells) - len(graded)} informational")
        lines.append("")
    lines.append("overall: " + ("PASS" if all_pass else "FAIL"))
    return "\n".join(lines), 0 if all_pass else 2


def _run_list_presets(args, lib: PresetLibrary) -> tuple[str, int]:
    catalog = lib.catalog
    if args.format == "json":
        payload = {
            "models": catalog.model_names(),
            "components": catalog.component_names(),
            "hardware": sorted(lib.hardware),
            "networks": sorted(lib.networks),
        }
        return json.dumps({k: list(v) for k, v in payload.items()}, indent=2), 0
    lines = ["models:"]
    for name in catalog.model_names():
        spec = catalog.model(name)
        expert = spec.action_expert.name if spec.action_expert else "none"
        lines.append(f"  {name:<14} {spec.vision_encoder.name} + "
                     f"{spec.vlm.name} + {expert}, {spec.decoding_mode}, "
                     f"chunk {spec.chunk_size}, {spec.denoise_steps} steps")
    lines.append("components:")
    for name in catalog.component_names():
        cfg = catalog.component(name)
        lines.append(f"  {name:<14} {cfg.num_layers} layers, hidden "
                     f"{cfg.hidden_size}, ffn {cfg.intermediate_size}, "
                     f"{cfg.num_q_heads}Q/{cfg.num_kv_heads}KV, "
                     f"head dim {cfg.head_dim}")
    lines.append("hardware:")
    for name in sorted(lib.hardware):
        hw = lib.hardware[name]
        lines.append(f"  {name:<14} {hw.peak(2) / 1e12:.0f} TFLOP/s bf16, "
                     f"{hw.mem_bandwidth / 1e9:.0f} GB/s, "
                     f"{hw.mem_capacity / GIB:.0f} GB")
    lines.append("networks:")
    for name in sorted(lib.networks):
        net = lib.networks[name]
        lines.append(f"  {name:<14} {net.upload_bw / 1e6:.0f} Mbps up / "
                     f"{net.download_bw / 1e6:.0f} Mbps down, base "
                     f"{net.base_latency * 1e3:.2f} ms")
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["kind", "name"])
        for kind, names in (("model", catalog.model_names()),
                            ("component", catalog.component_names()),
                            ("hardware", sorted(lib.hardware)),
                            ("network", sorted(lib.networks))):
            for name in names:
                writer.writerow([kind, name])
        return buf.getvalue().rstrip("\n"), 0
    return "\n".join(lines), 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        lib = load_presets()
        if args.command == "analyze":
            text, code = _run_analyze(args, lib, parser)
        elif args.command == "sweep":
            text, code = _run_sweep(args, lib, parser)
        elif args.command == "reproduce":
            text, code = _run_reproduce(args, lib)
        else:
            text, code = _run_list_presets(args, lib)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
