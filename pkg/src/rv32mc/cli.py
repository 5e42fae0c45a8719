"""Command-line front end.

Subcommands:
    asm      assemble a source file to a hex image
    dis      disassemble a hex image to canonical source
    run      program, reset, execute, and report cycles/CPI/energy
    script   execute a bring-up script
    selftest frozen-encoding and engine consistency checks

Exit codes: 0 success, 2 input/assembly errors, 3 runtime faults,
4 cycle-budget exhaustion.  All configuration is via flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .asm import assemble, disassemble, load_hex_file, save_hex_file
from .errors import AsmError, ScriptError, SimError
from .harness import PeripheralMap, Simulator, execute_script, parse_script
from .metrics import EnergyModel, HaltReason, attach_metrics, render_kv, render_text
from .selfcheck import run_selftest

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_FAULT = 3
EXIT_BUDGET = 4


@dataclass
class CliConfig:
    mem_size_bytes: int = 4096
    pj_per_cycle: float = 17.18
    freq_hz: float = 50e6
    max_cycles: int = 1_000_000
    trace_enabled: bool = False
    peripheral_map_file: str | None = None

    def __post_init__(self) -> None:
        for name in ("mem_size_bytes", "pj_per_cycle", "freq_hz", "max_cycles"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def _error(kind: str, exc: object) -> None:
    print(f"error[{kind}]: {exc}", file=sys.stderr)


def _peripherals(cfg: CliConfig) -> PeripheralMap:
    if cfg.peripheral_map_file is None:
        return PeripheralMap.default(cfg.mem_size_bytes)
    with open(cfg.peripheral_map_file, "r", encoding="utf-8") as f:
        config = json.load(f)
    return PeripheralMap.from_config(config["devices"] if isinstance(config, dict) else config)


def _cmd_asm(args: argparse.Namespace) -> int:
    try:
        with open(args.source, "r", encoding="utf-8") as f:
            image = assemble(f.read(), base=args.base)
        save_hex_file(args.output, image)
    except (OSError, SimError) as e:
        _error("asm", e)
        return EXIT_INPUT
    return EXIT_OK


def _cmd_dis(args: argparse.Namespace) -> int:
    try:
        sys.stdout.write(disassemble(load_hex_file(args.image)))
    except (OSError, SimError) as e:
        _error("dis", e)
        return EXIT_INPUT
    return EXIT_OK


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = CliConfig(
            mem_size_bytes=args.mem_size,
            pj_per_cycle=args.pj_per_cycle,
            freq_hz=args.freq_hz,
            max_cycles=args.max_cycles,
            trace_enabled=args.trace,
            peripheral_map_file=args.peripheral_map,
        )
        image = load_hex_file(args.image)
        sim = Simulator(cfg.mem_size_bytes, peripherals=_peripherals(cfg))
    except (OSError, ValueError, SimError, KeyError) as e:
        _error("input", e)
        return EXIT_INPUT

    trace = None
    if cfg.trace_enabled:
        trace = lambda rec: print(rec.as_csv())

    try:
        sim.program_and_start(image)
        report = sim.run(max_cycles=cfg.max_cycles, trace=trace)
    except SimError as e:
        _error("fault", e)
        return EXIT_FAULT

    attach_metrics(report, EnergyModel(cfg.pj_per_cycle, cfg.freq_hz))
    rendered = render_kv(report) if args.format == "kv" else render_text(report)
    print(rendered)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as f:
            f.write(rendered + "\n")
    if args.dump_mem:
        save_hex_file(args.dump_mem, sim.mem.dump_image())

    if report.halt_reason is HaltReason.CYCLE_BUDGET_EXHAUSTED:
        _error("budget", f"no halt within {cfg.max_cycles} cycles")
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_script(args: argparse.Namespace) -> int:
    import os

    base_dir = os.path.dirname(os.path.abspath(args.script))
    try:
        with open(args.script, "r", encoding="utf-8") as f:
            script = parse_script(
                f.read(),
                resolve=lambda p: p if os.path.isabs(p) else os.path.join(base_dir, p),
            )
    except (OSError, ScriptError, AsmError) as e:
        _error("script", e)
        return EXIT_INPUT
    try:
        sim = Simulator(args.mem_size, peripherals=PeripheralMap.default(args.mem_size))
        execute_script(sim, script, write=print)
    except SimError as e:
        _error("fault", e)
        return EXIT_FAULT
    return EXIT_OK


def _cmd_selftest(args: argparse.Namespace) -> int:
    return EXIT_OK if run_selftest(write=print) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rv32mc",
        description="Cycle-accurate multi-cycle RV32I controller-core simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("asm", help="assemble source to a hex image")
    p.add_argument("source")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--base", type=lambda s: int(s, 0), default=0)
    p.set_defaults(func=_cmd_asm)

    p = sub.add_parser("dis", help="disassemble a hex image")
    p.add_argument("image")
    p.set_defaults(func=_cmd_dis)

    p = sub.add_parser("run", help="program, execute, and report")
    p.add_argument("image")
    p.add_argument("--trace", action="store_true", help="print one CSV line per cycle")
    p.add_argument("--max-cycles", type=int, default=1_000_000)
    p.add_argument("--mem-size", type=lambda s: int(s, 0), default=4096)
    p.add_argument("--pj-per-cycle", type=float, default=17.18)
    p.add_argument("--freq-hz", type=float, default=50e6)
    p.add_argument("--peripheral-map", default=None, help="JSON device map")
    p.add_argument("--format", choices=("text", "kv"), default="text")
    p.add_argument("--report", default=None, help="also write the report to a file")
    p.add_argument("--dump-mem", default=None, help="write final memory as a hex image")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("script", help="execute a bring-up script")
    p.add_argument("script")
    p.add_argument("--mem-size", type=lambda s: int(s, 0), default=4096)
    p.set_defaults(func=_cmd_script)

    p = sub.add_parser("selftest", help="frozen-encoding and engine checks")
    p.set_defaults(func=_cmd_selftest)

    return parser


def dispatch(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
