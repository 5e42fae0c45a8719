import pytest

from rv32mc import (
    ControlMode,
    HaltReason,
    InstrClass,
    MemoryImage,
    PeripheralMap,
    Simulator,
    assemble,
    execute_script,
    parse_hex,
    parse_script,
)
from rv32mc.errors import (
    MisalignedAccess,
    OutOfRange,
    ScriptError,
    UnmappedAddress,
    UnsupportedInstruction,
    WriteForbiddenInMode,
)
from rv32mc.harness import Peripheral
from rv32mc.programs import PACER

DEMO = "addi x1, x0, 5\njal x0, 0\n"


# --- bring-up protocol ---

def test_program_and_start_end_to_end():
    sim = Simulator()
    sim.program_and_start(assemble(DEMO))
    assert sim.mode is ControlMode.EXECUTING
    assert sim.core.pc == 0
    report = sim.run()
    assert sim.core.regs[1] == 5
    assert report.halt_reason is HaltReason.SELF_LOOP


def test_program_and_start_twice_restarts():
    sim = Simulator()
    sim.program_and_start(assemble(DEMO))
    sim.run()
    sim.program_and_start(assemble("addi x2, x0, 9\njal x0, 0\n"))
    assert sim.core.pc == 0
    sim.run()
    assert sim.core.regs[2] == 9
    # the second image overwrote the words it covers
    assert sim.mem.read_word(0) == assemble("addi x2, x0, 9").words[0]


def test_program_and_start_empty_image_faults_at_word_zero():
    sim = Simulator()
    sim.program_and_start(MemoryImage(0, []))
    with pytest.raises(UnsupportedInstruction) as exc:
        sim.run()
    assert exc.value.pc == 0


def test_failed_load_leaves_observation_mode():
    sim = Simulator()
    with pytest.raises(OutOfRange):
        sim.program_and_start(MemoryImage(0, [0] * 2000))
    assert sim.mode is ControlMode.OBSERVATION


def test_external_write_rejected_while_executing():
    sim = Simulator()
    sim.program_and_start(assemble(DEMO))
    with pytest.raises(WriteForbiddenInMode):
        sim.mem.load_image(MemoryImage(0, [0]), sim.mode)


def test_bring_up_reports_are_identical_across_runs():
    def fresh_report():
        sim = Simulator()
        sim.program_and_start(assemble("lw x1, 64(x0)\nsw x1, 68(x0)\njal x0, 0\n"))
        return sim.run()

    assert fresh_report() == fresh_report()


# --- observation ---

def test_observe_returns_loaded_image():
    sim = Simulator()
    image = assemble(DEMO)
    sim.apply_control(ie=0, reset=0, write_enable=1)
    sim.mem.load_image(image, sim.mode)
    result = sim.observe(0, 4 * len(image.words))
    assert list(result.words) == image.words
    assert not result.execution_stopped
    assert sim.mode is ControlMode.PROGRAMMING  # prior mode restored


def test_observe_does_not_mutate_memory():
    sim = Simulator()
    sim.program_and_start(assemble(DEMO))
    before = list(sim.mem.words)
    sim.observe(0, 64)
    assert sim.mem.words == before


def test_observe_stops_executing_core_without_resume():
    sim = Simulator()
    sim.program_and_start(assemble(DEMO))
    result = sim.observe(0, 8)
    assert result.execution_stopped
    assert sim.mode is ControlMode.OBSERVATION
    held = sim.step_cycle()
    assert held.held  # still stopped until an explicit start
    sim.apply_control(ie=1, reset=0)
    report = sim.run()
    assert report.halt_reason is HaltReason.SELF_LOOP


def test_observe_range_errors():
    sim = Simulator()
    with pytest.raises(OutOfRange):
        sim.observe(4096, 4)
    with pytest.raises(OutOfRange):
        sim.observe(4092, 8)
    with pytest.raises(MisalignedAccess):
        sim.observe(2, 4)
    with pytest.raises(MisalignedAccess):
        sim.observe(0, 6)


# --- peripherals ---

def test_mmio_write_then_read():
    pmap = PeripheralMap.default(4096)
    pmap.dispatch(0x1008, "write", value=0x1234, cycle=7)
    assert pmap.dispatch(0x1008, "read", cycle=9) == 0x1234
    log = pmap.device("pacing").event_log
    assert [(r.cycle, r.access, r.value) for r in log] == [
        (7, "write", 0x1234),
        (9, "read", 0x1234),
    ]


def test_mmio_gap_is_unmapped():
    pmap = PeripheralMap.default(4096)
    with pytest.raises(UnmappedAddress):
        pmap.dispatch(0x1050 + 0x100, "read")


def test_unmapped_vs_out_of_range_are_distinct():
    bare = Simulator()  # no peripherals: plain memory bound
    with pytest.raises(OutOfRange):
        bare.bus.read_word(0x1000)
    mapped = Simulator(peripherals=PeripheralMap.default(4096))
    assert mapped.bus.read_word(0x1000) == 0
    with pytest.raises(UnmappedAddress):
        mapped.bus.read_word(0x2000)
    assert not isinstance(UnmappedAddress("x"), OutOfRange)


def test_device_map_validation():
    with pytest.raises(ValueError):
        PeripheralMap([Peripheral("pacing", 0x1000), Peripheral("sensing", 0x1008)])
    with pytest.raises(ValueError):
        Peripheral("radio", 0x1000)
    with pytest.raises(ValueError):
        Simulator(peripherals=PeripheralMap([Peripheral("pacing", 0x800)]))


def test_firmware_mmio_pulse_train():
    sim = Simulator(peripherals=PeripheralMap.default(4096))
    sim.program_and_start(assemble(PACER))
    report = sim.run()
    assert report.halt_reason is HaltReason.SELF_LOOP
    pacing = sim.peripherals.device("pacing")
    writes = pacing.writes()
    assert len(writes) == report.retired[InstrClass.STORE]
    assert len(writes) == 8
    cycles = [r.cycle for r in writes]
    assert cycles == sorted(cycles) and len(set(cycles)) == len(cycles)
    reads = [r for r in sim.peripherals.device("sensing").event_log if r.access == "read"]
    assert len(reads) == 8


def test_peripheral_isolation():
    sim = Simulator(peripherals=PeripheralMap.default(4096))
    sim.program_and_start(assemble(PACER))
    mem_after_load = list(sim.mem.words)
    sim.run()
    # pacing stores landed in the device, not in memory
    assert sim.mem.words == mem_after_load
    assert sim.peripherals.device("pacing").writes()


def test_mmio_write_forbidden_in_observation():
    sim = Simulator(peripherals=PeripheralMap.default(4096))
    with pytest.raises(WriteForbiddenInMode):
        sim.bus.schedule_write(0x1008, 1, ControlMode.OBSERVATION)


# --- bring-up scripts ---

def test_parse_script_steps(tmp_path):
    hexfile = tmp_path / "demo.hex"
    hexfile.write_text("00500093\n0000006f\n")
    text = """
# bring-up
load demo.hex
reset
start
run 8
stop
observe 0x0 8
"""
    script = parse_script(text, resolve=lambda p: str(tmp_path / p))
    assert len(script.steps) == 6


def test_script_requires_reset_before_start():
    with pytest.raises(ScriptError) as exc:
        parse_script("start\n")
    assert "reset" in str(exc.value)


@pytest.mark.parametrize(
    "line", ["bogus", "load", "run many", "observe 0", "run 1 2"]
)
def test_script_parse_errors(line):
    with pytest.raises(ScriptError):
        parse_script(line + "\n")


def test_execute_script_end_to_end(tmp_path):
    hexfile = tmp_path / "demo.hex"
    hexfile.write_text("00500093\n0000006f\n")
    script = parse_script(
        "load demo.hex\nreset\nstart\nrun 8\nstop\nobserve 0 8\n",
        resolve=lambda p: str(tmp_path / p),
    )
    sim = Simulator()
    out = []
    execute_script(sim, script, write=out.append)
    assert sim.core.regs[1] == 5  # the 8 cycles retired both instructions
    # observe output is reloadable hex
    image = parse_hex("\n".join(out))
    assert image.words == [0x00500093, 0x0000006F]


def test_script_run_counts_held_cycles(tmp_path):
    script = parse_script("run 5\n")
    sim = Simulator()
    out = []
    execute_script(sim, script, write=out.append)
    assert "# run 5: 0 executing, 5 held" in out
