"""Two-pass assembler, disassembler, and the hex image file format.

Grammar, one statement per line:

    [label:] mnemonic operands      # comment   // comment
    [label:] .org ADDR              place following words at ADDR
    [label:] .word VALUE            emit a raw 32-bit word

Registers are x0..x31 only.  Immediates are decimal or 0x hex, optionally
signed.  Branch and jump targets are labels (resolved pc-relative) or
signed byte-offset literals.  Memory operands are written OFFSET(xN).

Hex image files carry one 8-digit word per line, lowest address first,
with optional `@HEXADDR` records giving the word address of what follows;
`#` and `//` comments and blank lines are ignored.  Dumps and observation
output use the same format, so they are reloadable.
"""

from __future__ import annotations

import re

from .errors import (
    AsmError,
    BadOperand,
    BranchTargetMisaligned,
    DuplicateLabel,
    EncodeError,
    ImmediateOutOfRange,
    MisalignedImmediate,
    OperandCount,
    SimError,
    UndefinedLabel,
    UnknownMnemonic,
)
from .isa import (
    DecodedInstruction,
    InstrClass,
    MNEMONIC_CLASS,
    decode,
    encode,
    instr,
)
from .memory import MemoryImage

_COMMENT_RE = re.compile(r"#.*|//.*")
_LABEL_RE = re.compile(r"^([A-Za-z_.][\w.]*)\s*:\s*(.*)$")
_IDENT_RE = re.compile(r"^[A-Za-z_.][\w.]*$")
_REG_RE = re.compile(r"^x(3[01]|[12]?[0-9])$")
_IMM_RE = re.compile(r"^[+-]?(0[xX][0-9a-fA-F]+|[0-9]+)$")
_MEM_RE = re.compile(r"^([+-]?(?:0[xX][0-9a-fA-F]+|[0-9]+))\s*\(\s*(x\d+)\s*\)$")


def _parse_reg(tok: str, line: int) -> int:
    if not _REG_RE.match(tok):
        raise BadOperand(f"{tok!r} is not a register (x0..x31)", line=line)
    return int(tok[1:])


def _parse_imm(tok: str, line: int) -> int:
    if not _IMM_RE.match(tok):
        raise BadOperand(f"{tok!r} is not a decimal or 0x immediate", line=line)
    return int(tok, 0)


class _Statement:
    __slots__ = ("line", "addr", "kind", "mnemonic", "operands")

    def __init__(self, line: int, kind: str, mnemonic: str, operands: list[str]):
        self.line = line
        self.addr = 0
        self.kind = kind  # "instr" | "word"
        self.mnemonic = mnemonic
        self.operands = operands


def assemble(source: str, base: int = 0) -> MemoryImage:
    """Assemble source text into a memory image.

    Pass 1 places statements and collects labels; pass 2 encodes.  The
    image starts at the first emitted word; `.org` gaps are zero-filled.
    """
    if base % 4:
        raise BadOperand(f"base address {base:#x} is not word-aligned")

    labels: dict[str, int] = {}
    stmts: list[_Statement] = []
    addr = base

    for lineno, raw in enumerate(source.splitlines(), start=1):
        text = _COMMENT_RE.sub("", raw).strip()
        while text:
            m = _LABEL_RE.match(text)
            if not m:
                break
            label, text = m.group(1), m.group(2).strip()
            if label in labels:
                raise DuplicateLabel(f"label {label!r} already defined", line=lineno)
            labels[label] = addr
        if not text:
            continue

        parts = text.split(None, 1)
        mnemonic = parts[0].lower()
        rest = parts[1] if len(parts) > 1 else ""

        if mnemonic == ".org":
            target = _parse_imm(rest.strip(), lineno) if rest.strip() else None
            if target is None:
                raise OperandCount(".org needs an address", line=lineno)
            if target % 4:
                raise MisalignedImmediate(f".org {target:#x} is not word-aligned", line=lineno)
            if target < addr:
                raise BadOperand(f".org {target:#x} moves backward from {addr:#x}", line=lineno)
            addr = target
            continue

        if mnemonic == ".word":
            if not rest.strip():
                raise OperandCount(".word needs a value", line=lineno)
            st = _Statement(lineno, "word", ".word", [rest.strip()])
        else:
            operands = [o.strip() for o in rest.split(",")] if rest.strip() else []
            st = _Statement(lineno, "instr", mnemonic, operands)
        st.addr = addr
        stmts.append(st)
        addr += 4

    emitted: dict[int, int] = {}
    for st in stmts:
        if st.kind == "word":
            value = _parse_imm(st.operands[0], st.line)
            if not -(1 << 31) <= value < (1 << 32):
                raise ImmediateOutOfRange(f".word value {value} needs more than 32 bits", line=st.line)
            emitted[st.addr] = value & 0xFFFFFFFF
        else:
            emitted[st.addr] = _encode_statement(st, labels)

    if not emitted:
        return MemoryImage(base, [])
    lo = min(emitted)
    hi = max(emitted)
    return MemoryImage(lo, [emitted.get(a, 0) for a in range(lo, hi + 4, 4)])


def _encode_statement(st: _Statement, labels: dict[str, int]) -> int:
    m = st.mnemonic
    if m not in MNEMONIC_CLASS:
        raise UnknownMnemonic(f"unknown mnemonic {m!r}", line=st.line)
    cls = MNEMONIC_CLASS[m]
    ops = st.operands

    def need(n: int) -> None:
        if len(ops) != n:
            raise OperandCount(f"{m} takes {n} operands, got {len(ops)}", line=st.line)

    try:
        if cls is InstrClass.R_ALU:
            need(3)
            ins = instr(m, rd=_parse_reg(ops[0], st.line),
                        rs1=_parse_reg(ops[1], st.line), rs2=_parse_reg(ops[2], st.line))
        elif cls is InstrClass.I_ALU:
            need(3)
            ins = instr(m, rd=_parse_reg(ops[0], st.line),
                        rs1=_parse_reg(ops[1], st.line), imm=_parse_imm(ops[2], st.line))
        elif cls is InstrClass.LOAD:
            need(2)
            imm, rs1 = _parse_mem_operand(ops[1], st.line)
            ins = instr(m, rd=_parse_reg(ops[0], st.line), rs1=rs1, imm=imm)
        elif cls is InstrClass.STORE:
            need(2)
            imm, rs1 = _parse_mem_operand(ops[1], st.line)
            ins = instr(m, rs2=_parse_reg(ops[0], st.line), rs1=rs1, imm=imm)
        elif cls is InstrClass.BRANCH:
            need(3)
            offset = _branch_offset(ops[2], st, labels)
            ins = instr(m, rs1=_parse_reg(ops[0], st.line),
                        rs2=_parse_reg(ops[1], st.line), imm=offset)
        else:  # JUMP
            need(2)
            offset = _branch_offset(ops[1], st, labels)
            ins = instr(m, rd=_parse_reg(ops[0], st.line), imm=offset)
        return encode(ins)
    except EncodeError as e:
        raise type(e)(e.message, line=st.line) from e


def _parse_mem_operand(tok: str, line: int) -> tuple[int, int]:
    m = _MEM_RE.match(tok)
    if not m:
        raise BadOperand(f"{tok!r} is not an OFFSET(xN) operand", line=line)
    return int(m.group(1), 0), _parse_reg(m.group(2), line)


def _branch_offset(tok: str, st: _Statement, labels: dict[str, int]) -> int:
    if _IMM_RE.match(tok):
        offset = int(tok, 0)
        if offset % 2:
            raise BranchTargetMisaligned(f"odd target offset {offset}", line=st.line)
        return offset
    if _IDENT_RE.match(tok) and not _REG_RE.match(tok):
        if tok not in labels:
            raise UndefinedLabel(f"label {tok!r} is not defined", line=st.line)
        return labels[tok] - st.addr
    raise BadOperand(f"{tok!r} is not a label or offset", line=st.line)


def format_instruction(ins: DecodedInstruction) -> str:
    """Canonical text for one instruction; assembles back to the same word."""
    m = ins.mnemonic
    if ins.cls is InstrClass.R_ALU:
        return f"{m} x{ins.rd}, x{ins.rs1}, x{ins.rs2}"
    if ins.cls is InstrClass.I_ALU:
        return f"{m} x{ins.rd}, x{ins.rs1}, {ins.imm}"
    if ins.cls is InstrClass.LOAD:
        return f"{m} x{ins.rd}, {ins.imm}(x{ins.rs1})"
    if ins.cls is InstrClass.STORE:
        return f"{m} x{ins.rs2}, {ins.imm}(x{ins.rs1})"
    if ins.cls is InstrClass.BRANCH:
        return f"{m} x{ins.rs1}, x{ins.rs2}, {ins.imm}"
    return f"{m} x{ins.rd}, {ins.imm}"


def disassemble(image: MemoryImage) -> str:
    """Canonical source for an image; undecodable words become `.word`."""
    lines = []
    for word in image.words:
        try:
            lines.append(format_instruction(decode(word)))
        except SimError:
            lines.append(f".word 0x{word:08X}")
    return "\n".join(lines) + ("\n" if lines else "")


# --- hex image files ---

def image_to_hex(image: MemoryImage) -> str:
    lines = []
    if image.base_address:
        lines.append(f"@{image.base_address >> 2:x}")
    lines.extend(f"{w:08x}" for w in image.words)
    return "\n".join(lines) + ("\n" if lines else "")


def parse_hex(text: str) -> MemoryImage:
    """Inverse of image_to_hex; sparse records are zero-filled between."""
    words: dict[int, int] = {}
    word_addr = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _COMMENT_RE.sub("", raw).strip()
        if not line:
            continue
        if line.startswith("@"):
            try:
                word_addr = int(line[1:], 16)
            except ValueError:
                raise AsmError(f"bad address record {line!r}", line=lineno) from None
            continue
        if not re.fullmatch(r"[0-9a-fA-F]{1,8}", line):
            raise AsmError(f"bad hex word {line!r}", line=lineno)
        words[word_addr] = int(line, 16)
        word_addr += 1
    if not words:
        return MemoryImage(0, [])
    lo, hi = min(words), max(words)
    return MemoryImage(lo * 4, [words.get(a, 0) for a in range(lo, hi + 1)])


def load_hex_file(path: str) -> MemoryImage:
    with open(path, "r", encoding="utf-8") as f:
        return parse_hex(f.read())


def save_hex_file(path: str, image: MemoryImage) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(image_to_hex(image))
