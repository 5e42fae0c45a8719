"""Unified instruction/data memory.

Reads are asynchronous: they return the committed contents immediately.
Writes are synchronous: schedule_write records at most one pending write,
which commit_cycle applies at the cycle boundary.  Writes are gated by the
control mode, so observation mode can never mutate memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .control import WRITE_MODES, ControlMode
from .errors import (
    DoubleWritePerCycle,
    MisalignedAccess,
    OutOfRange,
    WriteForbiddenInMode,
)
from .isa import u32


@dataclass
class MemoryImage:
    """Contiguous block of words placed at a word-aligned byte address."""

    base_address: int
    words: list[int] = field(default_factory=list)

    @property
    def end_address(self) -> int:
        return self.base_address + 4 * len(self.words)


class UnifiedMemory:
    def __init__(self, size_bytes: int = 4096):
        if size_bytes <= 0 or size_bytes % 4:
            raise ValueError(f"size_bytes={size_bytes} must be a positive multiple of 4")
        self.size_bytes = size_bytes
        self.words = [0] * (size_bytes // 4)
        self.pending_write: tuple[int, int] | None = None

    def _check_addr(self, addr: int) -> int:
        if addr % 4:
            raise MisalignedAccess("word access must be 4-byte aligned", addr=addr)
        if not 0 <= addr <= self.size_bytes - 4:
            raise OutOfRange(f"beyond {self.size_bytes}-byte memory", addr=addr)
        return addr >> 2

    def read_word(self, addr: int) -> int:
        """Committed contents at addr; a pending write is not yet visible."""
        return self.words[self._check_addr(addr)]

    def schedule_write(self, addr: int, value: int, mode: ControlMode) -> None:
        if mode not in WRITE_MODES:
            raise WriteForbiddenInMode(f"write while in {mode.value} mode", addr=addr)
        self._check_addr(addr)
        if self.pending_write is not None:
            raise DoubleWritePerCycle("write port already claimed this cycle", addr=addr)
        self.pending_write = (addr, u32(value))

    def commit_cycle(self) -> None:
        if self.pending_write is not None:
            addr, value = self.pending_write
            self.words[addr >> 2] = value
            self.pending_write = None

    def load_image(self, image: MemoryImage, mode: ControlMode) -> int:
        """Write a whole image, one word per clock; programming mode only."""
        if mode is not ControlMode.PROGRAMMING:
            raise WriteForbiddenInMode(f"image load while in {mode.value} mode")
        if image.base_address % 4:
            raise MisalignedAccess("image base must be word-aligned", addr=image.base_address)
        if image.words and not 0 <= image.base_address <= self.size_bytes - 4 * len(image.words):
            raise OutOfRange(
                f"image [{image.base_address:#x}, {image.end_address:#x}) "
                f"beyond {self.size_bytes}-byte memory",
                addr=image.base_address,
            )
        for k, value in enumerate(image.words):
            self.schedule_write(image.base_address + 4 * k, value, mode)
            self.commit_cycle()
        return len(image.words)

    def dump_image(self, start: int = 0, count: int | None = None) -> MemoryImage:
        """Committed memory contents as a reloadable image."""
        if count is None:
            count = (self.size_bytes - start) // 4
        self._check_addr(start)
        if count:
            self._check_addr(start + 4 * (count - 1))
        return MemoryImage(start, [self.words[(start >> 2) + k] for k in range(count)])
