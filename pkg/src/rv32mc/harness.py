"""Host-side bring-up controller.

Drives the IE / reset / WriteData sequence that separates programming from
execution, provides read-only observation of memory, and routes core
accesses that fall above memory to stub peripherals (pacing, sensing, egm,
telemetry, battery).  Each stub exposes three live registers - CONTROL at
offset 0x0, STATUS at 0x4, DATA at 0x8 - inside a 16-byte span, and logs
every access with a cycle stamp.

Bring-up scripts are line-oriented:

    load <hexfile>
    reset
    start
    stop
    run <cycles>
    observe <addr> <len>

Observation output is emitted in the hex image format, so it can be fed
straight back to `load`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .asm import image_to_hex, load_hex_file
from .control import WRITE_MODES, ControlMode
from .core import Core, HaltPolicy, TraceRecord, self_loop_halt
from .errors import (
    MisalignedAccess,
    OutOfRange,
    ScriptError,
    SimError,
    UnmappedAddress,
    WriteForbiddenInMode,
)
from .memory import MemoryImage, UnifiedMemory
from .metrics import RunReport

DEVICE_NAMES = ("pacing", "sensing", "egm", "telemetry", "battery")
DEVICE_SPAN = 16

REG_CONTROL = 0x0
REG_STATUS = 0x4
REG_DATA = 0x8


@dataclass(frozen=True)
class AccessRecord:
    cycle: int
    access: str  # "read" | "write"
    addr: int
    value: int


@dataclass
class Peripheral:
    name: str
    base: int
    span: int = DEVICE_SPAN
    regs: list[int] = field(default_factory=list)
    event_log: list[AccessRecord] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.name not in DEVICE_NAMES:
            raise ValueError(f"unknown device {self.name!r}; expected one of {DEVICE_NAMES}")
        if self.base % 4 or self.span % 4 or self.span <= 0:
            raise ValueError(f"{self.name}: base/span must be positive multiples of 4")
        if not self.regs:
            self.regs = [0] * (self.span // 4)

    def contains(self, addr: int) -> bool:
        return self.base <= addr < self.base + self.span

    def writes(self) -> list[AccessRecord]:
        return [r for r in self.event_log if r.access == "write"]


class PeripheralMap:
    def __init__(self, devices: Iterable[Peripheral]):
        self.devices = list(devices)
        spans = sorted((d.base, d.base + d.span, d.name) for d in self.devices)
        for (_, end_a, name_a), (start_b, _, name_b) in zip(spans, spans[1:]):
            if start_b < end_a:
                raise ValueError(f"devices {name_a!r} and {name_b!r} overlap")

    @classmethod
    def default(cls, mem_size_bytes: int = 4096) -> "PeripheralMap":
        """One device per block, packed immediately above memory."""
        return cls(
            Peripheral(name, mem_size_bytes + i * DEVICE_SPAN)
            for i, name in enumerate(DEVICE_NAMES)
        )

    @classmethod
    def from_config(cls, config: list[dict]) -> "PeripheralMap":
        return cls(
            Peripheral(d["name"], int(d["base"]), int(d.get("span", DEVICE_SPAN)))
            for d in config
        )

    def find(self, addr: int) -> Peripheral | None:
        for d in self.devices:
            if d.contains(addr):
                return d
        return None

    def device(self, name: str) -> Peripheral:
        for d in self.devices:
            if d.name == name:
                return d
        raise KeyError(name)

    def dispatch(self, addr: int, access: str, value: int = 0, cycle: int = 0) -> int:
        """Read or write one device register; every access is logged."""
        if addr % 4:
            raise MisalignedAccess("device registers are word-wide", addr=addr)
        dev = self.find(addr)
        if dev is None:
            raise UnmappedAddress("no device at address", addr=addr)
        idx = (addr - dev.base) >> 2
        if access == "read":
            value = dev.regs[idx]
        elif access == "write":
            dev.regs[idx] = value & 0xFFFFFFFF
        else:
            raise ValueError(f"access must be 'read' or 'write', not {access!r}")
        dev.event_log.append(AccessRecord(cycle, access, addr, value & 0xFFFFFFFF))
        return value


class SystemBus:
    """Routes word accesses to memory or, above it, to the peripheral map."""

    def __init__(
        self,
        mem: UnifiedMemory,
        peripherals: PeripheralMap | None = None,
        clock: Callable[[], int] = lambda: 0,
    ):
        self.mem = mem
        self.peripherals = peripherals
        self.clock = clock

    def _in_memory(self, addr: int) -> bool:
        return 0 <= addr < self.mem.size_bytes

    def read_word(self, addr: int) -> int:
        if self.peripherals is None or self._in_memory(addr):
            return self.mem.read_word(addr)
        return self.peripherals.dispatch(addr, "read", cycle=self.clock())

    def schedule_write(self, addr: int, value: int, mode: ControlMode) -> None:
        if self.peripherals is None or self._in_memory(addr):
            self.mem.schedule_write(addr, value, mode)
            return
        if mode not in WRITE_MODES:
            raise WriteForbiddenInMode(f"write while in {mode.value} mode", addr=addr)
        self.peripherals.dispatch(addr, "write", value=value, cycle=self.clock())

    def commit_cycle(self) -> None:
        self.mem.commit_cycle()


@dataclass(frozen=True)
class ObserveResult:
    addr: int
    words: tuple[int, ...]
    execution_stopped: bool

    def as_image(self) -> MemoryImage:
        return MemoryImage(self.addr, list(self.words))


# Control-line settings that reproduce each externally reachable mode.
_MODE_LINES = {
    ControlMode.PROGRAMMING: (0, 0, 1),
    ControlMode.RESET_HOLD: (0, 1, 0),
    ControlMode.OBSERVATION: (0, 0, 0),
    ControlMode.EXECUTING: (1, 0, 0),
}


class Simulator:
    """One core + one unified memory (+ optional peripherals)."""

    def __init__(self, mem_size_bytes: int = 4096, peripherals: PeripheralMap | None = None):
        self.mem = UnifiedMemory(mem_size_bytes)
        self.core = Core()
        self.peripherals = peripherals
        if peripherals is not None:
            for d in peripherals.devices:
                if d.base < mem_size_bytes:
                    raise ValueError(f"device {d.name!r} overlaps memory")
        self.bus = SystemBus(self.mem, peripherals, clock=lambda: self.core.cycle_count)

    @property
    def mode(self) -> ControlMode:
        return self.core.mode

    def apply_control(self, ie: int, reset: int, write_enable: int = 0) -> ControlMode:
        return self.core.apply_control(ie, reset, write_enable)

    def step_cycle(self) -> TraceRecord:
        return self.core.step_cycle(self.bus)

    def step_instruction(self):
        return self.core.step_instruction(self.bus)

    def run(
        self,
        max_cycles: int = 1_000_000,
        halt: HaltPolicy = self_loop_halt,
        trace: Callable[[TraceRecord], None] | None = None,
    ) -> RunReport:
        return self.core.run(self.bus, max_cycles=max_cycles, halt=halt, trace=trace)

    def pulse_reset(self) -> None:
        """Assert reset for one cycle, then release into observation."""
        self.apply_control(ie=0, reset=1)
        self.step_cycle()
        self.apply_control(ie=0, reset=0, write_enable=0)

    def program_and_start(self, image: MemoryImage) -> None:
        """Canonical bring-up: program, reset to pc=0, then enable execution.

        On any load error the simulator is left parked in observation mode.
        """
        try:
            self.apply_control(ie=0, reset=0, write_enable=1)
            self.mem.load_image(image, self.core.mode)
            self.apply_control(ie=0, reset=1)
            self.step_cycle()  # hold reset across a clock edge
            self.apply_control(ie=1, reset=0)
        except SimError:
            self.apply_control(ie=0, reset=0, write_enable=0)
            raise

    def observe(self, addr: int, length: int) -> ObserveResult:
        """Read [addr, addr+length) under observation mode.

        A running core is stopped first (observation deasserts IE) and is
        not silently resumed; any other prior mode is restored.
        """
        if addr % 4 or length % 4 or length < 0:
            raise MisalignedAccess(
                f"observe range [{addr:#x}, +{length}) must be word-aligned", addr=addr
            )
        if length and not (0 <= addr and addr + length <= self.mem.size_bytes):
            raise OutOfRange(
                f"observe range beyond {self.mem.size_bytes}-byte memory", addr=addr
            )
        prior = self.core.mode
        self.apply_control(ie=0, reset=0, write_enable=0)
        words = tuple(self.mem.read_word(a) for a in range(addr, addr + length, 4))
        if prior is not ControlMode.EXECUTING:
            self.apply_control(*_MODE_LINES[prior])
        return ObserveResult(addr, words, execution_stopped=prior is ControlMode.EXECUTING)


# --- bring-up scripts ---

@dataclass(frozen=True)
class LoadImage:
    image: MemoryImage
    source: str = "<image>"


@dataclass(frozen=True)
class PulseReset:
    pass


@dataclass(frozen=True)
class StartExecution:
    pass


@dataclass(frozen=True)
class StopExecution:
    pass


@dataclass(frozen=True)
class Observe:
    addr: int
    length: int


@dataclass(frozen=True)
class RunCycles:
    cycles: int


Step = LoadImage | PulseReset | StartExecution | StopExecution | Observe | RunCycles


@dataclass
class BringUpScript:
    steps: list[Step]

    def validate(self) -> None:
        reset_seen = False
        for i, step in enumerate(self.steps, start=1):
            if isinstance(step, PulseReset):
                reset_seen = True
            elif isinstance(step, StartExecution) and not reset_seen:
                raise ScriptError("start before any reset", line=i)


def _script_int(tok: str, lineno: int) -> int:
    try:
        return int(tok, 0)
    except ValueError:
        raise ScriptError(f"bad number {tok!r}", line=lineno) from None


def parse_script(text: str, resolve: Callable[[str], str] = lambda p: p) -> BringUpScript:
    """Parse script text; `resolve` maps hex file names to paths."""
    steps: list[Step] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        cmd, args = tokens[0].lower(), tokens[1:]

        def need(n: int) -> None:
            if len(args) != n:
                raise ScriptError(f"{cmd} takes {n} argument(s), got {len(args)}", line=lineno)

        if cmd == "load":
            need(1)
            steps.append(LoadImage(load_hex_file(resolve(args[0])), source=args[0]))
        elif cmd == "reset":
            need(0)
            steps.append(PulseReset())
        elif cmd == "start":
            need(0)
            steps.append(StartExecution())
        elif cmd == "stop":
            need(0)
            steps.append(StopExecution())
        elif cmd == "run":
            need(1)
            steps.append(RunCycles(_script_int(args[0], lineno)))
        elif cmd == "observe":
            need(2)
            steps.append(Observe(_script_int(args[0], lineno), _script_int(args[1], lineno)))
        else:
            raise ScriptError(f"unknown command {cmd!r}", line=lineno)
    script = BringUpScript(steps)
    script.validate()
    return script


def execute_script(
    sim: Simulator, script: BringUpScript, write: Callable[[str], None] = print
) -> None:
    """Run a validated script; observation output is reloadable hex."""
    for step in script.steps:
        if isinstance(step, LoadImage):
            sim.apply_control(ie=0, reset=0, write_enable=1)
            n = sim.mem.load_image(step.image, sim.core.mode)
            sim.apply_control(ie=0, reset=0, write_enable=0)
            write(f"# load {step.source}: {n} words at 0x{step.image.base_address:08x}")
        elif isinstance(step, PulseReset):
            sim.pulse_reset()
            write("# reset: pc=0")
        elif isinstance(step, StartExecution):
            sim.apply_control(ie=1, reset=0)
            write("# start: executing")
        elif isinstance(step, StopExecution):
            sim.apply_control(ie=0, reset=0, write_enable=0)
            write("# stop: observation")
        elif isinstance(step, RunCycles):
            c0, h0 = sim.core.cycle_count, sim.core.held_cycles
            for _ in range(step.cycles):
                sim.step_cycle()
            write(
                f"# run {step.cycles}: {sim.core.cycle_count - c0} executing, "
                f"{sim.core.held_cycles - h0} held"
            )
        else:  # Observe
            result = sim.observe(step.addr, step.length)
            write(f"# observe 0x{step.addr:08x} +{step.length}")
            if result.execution_stopped:
                write("# execution stopped by observation; issue 'start' to resume")
            out = image_to_hex(result.as_image())
            if out:
                write(out.rstrip("\n"))
