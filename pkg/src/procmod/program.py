"""Programs over the register machine and their structured-text surface form.

A program is a fixed-capacity sequence of instruction lines, defined as a
prefix (search programs one line at a time, left to right).  Conditionals
and loops are plain test/cmp/jmp lines underneath; per-line structural tags
record which lines open and close them so partial programs can be grown and
complete ones decompiled back to ``if``/``for`` source text.

Well-structured programs have no interleaving jump ranges; terminating ones
only close loops of the object-iterating shape (counter cleared at the loop
head, updated right before the backward jump, which repeats while the
counter is inside ``[0, num_objects)``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import IntEnum
from typing import Sequence

from .machine import (
    CONST_OMEGA_MINUS_1,
    Bank,
    Instruction,
    ModelSignature,
    Opcode,
    Reg,
    _loop_depth,
)

__all__ = [
    "Tag",
    "Program",
    "ProgramError",
    "IncompleteProgramError",
    "MalformedProgramError",
    "TextSyntaxError",
    "is_well_structured",
    "is_terminating",
    "count_ifs",
    "count_loops",
    "loop_depth",
    "to_structured_text",
    "parse_structured_text",
]


class ProgramError(Exception):
    pass


class IncompleteProgramError(ProgramError):
    """The program still has undefined lines or unclosed structures."""


class MalformedProgramError(ProgramError):
    """The program cannot be decompiled to structured text."""


class TextSyntaxError(ProgramError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class Tag(IntEnum):
    PLAIN = 0
    FOR_HEAD = 1
    IF_COND = 2
    IF_JMP = 3
    FOR_INC = 4
    FOR_JMP = 5


def _default_latent_names(k: int) -> tuple[str, ...]:
    return tuple(f"z{i + 1}" for i in range(k))


@dataclass(frozen=True)
class Program:
    """A possibly partial program: the defined prefix of ``capacity`` lines.

    ``pending`` holds the line indices of conditional jumps whose targets
    are still the end-of-program sentinel (their ``if`` is open), innermost
    last.  Programs are immutable; the grow/patch helpers return copies.
    """

    capacity: int
    lines: tuple[Instruction, ...] = ()
    tags: tuple[int, ...] = ()
    pending: tuple[int, ...] = ()
    name: str = "model"
    latent_names: tuple[str, ...] = ()

    @staticmethod
    def empty(capacity: int, num_latent: int, name: str = "model",
              latent_names: Sequence[str] | None = None) -> "Program":
        names = tuple(latent_names) if latent_names else _default_latent_names(num_latent)
        return Program(capacity=capacity, name=name, latent_names=names)

    @property
    def frontier(self) -> int:
        return len(self.lines)

    @property
    def num_latent(self) -> int:
        return len(self.latent_names)

    @property
    def is_closed(self) -> bool:
        """No open conditionals; loops are open iff a head lacks its jump."""
        if self.pending:
            return False
        heads = sum(1 for t in self.tags if t == Tag.FOR_HEAD)
        closers = sum(1 for t in self.tags if t == Tag.FOR_JMP)
        return heads == closers

    @property
    def last_is_halt(self) -> bool:
        return bool(self.lines) and self.lines[-1].op == Opcode.HALT

    def append(self, instr: Instruction, tag: int = Tag.PLAIN) -> "Program":
        if self.frontier >= self.capacity:
            raise ProgramError("program is at capacity")
        return replace(self, lines=self.lines + (instr,), tags=self.tags + (tag,))

    def open_if(self, cond: Instruction, zf: int, cf: int) -> "Program":
        """Append a condition line plus its guarded jump (target still open)."""
        if self.frontier + 2 > self.capacity:
            raise ProgramError("no room for a conditional")
        jmp = Instruction(Opcode.JMP, zf=zf, cf=cf, target=self.capacity)
        return replace(
            self,
            lines=self.lines + (cond, jmp),
            tags=self.tags + (Tag.IF_COND, Tag.IF_JMP),
            pending=self.pending + (self.frontier + 1,),
        )

    def close_if(self) -> "Program":
        if not self.pending:
            raise ProgramError("no open conditional to close")
        at = self.pending[-1]
        patched = replace(self.lines[at], target=self.frontier)
        lines = self.lines[:at] + (patched,) + self.lines[at + 1:]
        return replace(self, lines=lines, pending=self.pending[:-1])

    def open_for(self, counter: int, ascending: bool) -> "Program":
        const = 0 if ascending else CONST_OMEGA_MINUS_1
        head = Instruction(Opcode.SET_CONST, a=Reg.latent(counter), const=const)
        return self.append(head, Tag.FOR_HEAD)

    def close_for(self, counter: int, ascending: bool, head_line: int) -> "Program":
        if self.frontier + 2 > self.capacity:
            raise ProgramError("no room to close the loop")
        upd = Instruction(Opcode.INC if ascending else Opcode.DEC, a=Reg.latent(counter))
        jmp = Instruction(Opcode.JMP, zf=0, cf=1 if not ascending else 0,
                          target=head_line + 1)
        return replace(
            self,
            lines=self.lines + (upd, jmp),
            tags=self.tags + (Tag.FOR_INC, Tag.FOR_JMP),
        )

    def with_halt(self) -> "Program":
        return self.append(Instruction(Opcode.HALT))

    @staticmethod
    def from_instructions(lines: Sequence[Instruction], capacity: int | None = None,
                          num_latent: int = 0, name: str = "model",
                          latent_names: Sequence[str] | None = None) -> "Program":
        """Wrap raw instructions, inferring structural tags from jump geometry."""
        lines = tuple(lines)
        cap = capacity if capacity is not None else len(lines)
        tags = [int(Tag.PLAIN)] * len(lines)
        for j, ins in enumerate(lines):
            if ins.op == Opcode.JMP and ins.target < j:
                tags[j] = Tag.FOR_JMP
                if j >= 1:
                    tags[j - 1] = Tag.FOR_INC
                if ins.target >= 1:
                    tags[ins.target - 1] = Tag.FOR_HEAD
        for j, ins in enumerate(lines):
            if ins.op == Opcode.JMP and ins.target >= j and tags[j] == Tag.PLAIN:
                tags[j] = Tag.IF_JMP
                if j >= 1 and lines[j - 1].op in (Opcode.TEST, Opcode.CMP):
                    tags[j - 1] = Tag.IF_COND
        k = num_latent
        if k == 0:
            for ins in lines:
                for r in (ins.a, ins.b):
                    if r is not None:
                        if r.bank == Bank.LATENT:
                            k = max(k, r.index + 1)
                        elif r.latents:
                            k = max(k, max(r.latents) + 1)
        names = tuple(latent_names) if latent_names else _default_latent_names(k)
        return Program(capacity=cap, lines=lines, tags=tuple(tags),
                       name=name, latent_names=names)


def is_well_structured(p: Program) -> bool:
    """True iff no two jump ranges in the defined prefix interleave."""
    jumps = [(i, ins.target) for i, ins in enumerate(p.lines) if ins.op == Opcode.JMP]
    for x in range(len(jumps)):
        i, it = jumps[x]
        for y in range(x + 1, len(jumps)):
            j, jt = jumps[y]
            lo_i, hi_i = min(i, it), max(i, it)
            lo_j, hi_j = min(j, jt), max(j, jt)
            if lo_i < lo_j < hi_i < hi_j:
                return False
    return True


def _writes_latent(ins: Instruction, z: int) -> bool:
    if ins.op in (Opcode.INC, Opcode.DEC, Opcode.SET_CONST, Opcode.SET_REG):
        r = ins.a
        return r is not None and r.bank == Bank.LATENT and r.index == z
    return False


def is_terminating(p: Program) -> bool:
    """True iff every backward jump closes an object-iterating loop.

    Shape: the counter is set at the loop head (to 0 ascending, to
    ``num_objects - 1`` descending), updated by inc/dec on the line right
    before the jump, and never written inside the body.
    """
    for j, ins in enumerate(p.lines):
        if ins.op != Opcode.JMP or ins.target > j:
            continue
        t = ins.target
        if j < 1 or t < 1:
            return False
        upd = p.lines[j - 1]
        if upd.op not in (Opcode.INC, Opcode.DEC) or upd.a.bank != Bank.LATENT:
            return False
        z = upd.a.index
        head = p.lines[t - 1]
        want = 0 if upd.op == Opcode.INC else CONST_OMEGA_MINUS_1
        if head.op != Opcode.SET_CONST or head.a.bank != Bank.LATENT \
                or head.a.index != z or head.const != want:
            return False
        if any(_writes_latent(p.lines[i], z) for i in range(t, j - 1)):
            return False
    return True


def count_ifs(p: Program) -> int:
    return sum(1 for t in p.tags if t == Tag.IF_JMP)


def count_loops(p: Program) -> int:
    """Loop heads in the defined prefix; open loops count during search."""
    return sum(1 for t in p.tags if t == Tag.FOR_HEAD)


def loop_depth(p: Program) -> int:
    return _loop_depth(p.lines)


# ---------------------------------------------------------------------------
# Rendering


def _reg_text(r: Reg, p: Program, sig: ModelSignature) -> str:
    if r.bank == Bank.LATENT:
        return p.latent_names[r.index]
    prefix = "pre_state" if r.bank == Bank.PRE else "post_state"
    if r.indirect:
        args = ", ".join(p.latent_names[i] for i in r.latents)
        if len(sig.state_vars) == 1:
            return f"{prefix}({args})"
        return f"{prefix}({sig.state_vars[r.family].name}, {args})"
    return f"{prefix}({r.index})"


def _condition_text(cond: Instruction, jmp: Instruction, p: Program,
                    sig: ModelSignature) -> str:
    zf, cf = jmp.zf, jmp.cf
    if cond.op == Opcode.TEST:
        opnd = _reg_text(cond.a, p, sig)
        if (zf, cf) == (1, 0):
            return f"{opnd} == 0"
        if (zf, cf) == (0, 1):
            boolean = cond.a.bank != Bank.LATENT and cond.a.indirect \
                and sig.is_boolean(cond.a.family)
            return f"{opnd} == 1" if boolean else f"{opnd} > 0"
        raise MalformedProgramError(f"unrenderable test guard ({zf},{cf})")
    if cond.op == Opcode.CMP:
        a = _reg_text(cond.a, p, sig)
        b = _reg_text(cond.b, p, sig)
        if (zf, cf) == (1, 0):
            return f"{a} == {b}"
        if (zf, cf) == (0, 1):
            return f"{a} > {b}"
        if (zf, cf) == (0, 0):
            return f"{a} < {b}"
        raise MalformedProgramError(f"unrenderable cmp guard ({zf},{cf})")
    raise MalformedProgramError("conditional jump lacks a test/cmp before it")


def _statement_text(ins: Instruction, p: Program, sig: ModelSignature) -> str:
    if ins.op == Opcode.HALT:
        return "return post_state;"
    if ins.op == Opcode.SET_CONST:
        dst = _reg_text(ins.a, p, sig)
        if ins.const == CONST_OMEGA_MINUS_1:
            return f"{dst} = num_objects - 1;"
        return f"{dst} = {ins.const};"
    if ins.op == Opcode.SET_REG:
        return f"{_reg_text(ins.a, p, sig)} = {_reg_text(ins.b, p, sig)};"
    if ins.op in (Opcode.INC, Opcode.DEC):
        dst = _reg_text(ins.a, p, sig)
        sign = "+" if ins.op == Opcode.INC else "-"
        return f"{dst} = {dst} {sign} 1;"
    raise MalformedProgramError(f"bare {ins.op.name} line cannot be rendered")


def _structure(p: Program, lo: int, hi: int) -> list:
    items = []
    i = lo
    while i < hi:
        tag = p.tags[i]
        if tag == Tag.FOR_HEAD:
            j = next((k for k in range(i + 1, len(p.lines))
                      if p.tags[k] == Tag.FOR_JMP and p.lines[k].target == i + 1), None)
            if j is None:
                raise IncompleteProgramError(f"loop opened at line {i} never closes")
            items.append(("for", i, _structure(p, i + 1, j - 1)))
            i = j + 1
        elif tag == Tag.IF_COND:
            jmp = p.lines[i + 1]
            t = min(jmp.target, hi)
            items.append(("if", i, _structure(p, i + 2, t)))
            i = t
        elif tag in (Tag.IF_JMP, Tag.FOR_INC, Tag.FOR_JMP):
            raise MalformedProgramError(f"dangling structural line at {i}")
        else:
            items.append(("line", i))
            i += 1
    return items


def to_structured_text(p: Program, sig: ModelSignature, name: str | None = None) -> str:
    """Decompile a fully defined program to its structured source text.

    Forward jumps render as ``if`` conditionals (condition recovered from
    the preceding test/cmp and the jump's guard pattern), backward jumps as
    ``for`` loops over the world objects.  A trailing halt becomes the
    final ``return post_state;``.
    """
    if p.pending:
        raise IncompleteProgramError("program has open conditionals")
    lines = p.lines
    drop_last = bool(lines) and lines[-1].op == Opcode.HALT
    items = _structure(p, 0, len(lines) - (1 if drop_last else 0))
    fname = name or p.name
    params = "".join(f", int {n}" for n in p.latent_names)
    out = [f"State {fname}(State pre_state{params}) {{",
           "  post_state = pre_state;"]

    def emit(items: list, depth: int) -> None:
        pad = "  " * depth
        for it in items:
            if it[0] == "line":
                out.append(pad + _statement_text(lines[it[1]], p, sig))
            elif it[0] == "for":
                head = lines[it[1]]
                z = p.latent_names[head.a.index]
                if head.const == CONST_OMEGA_MINUS_1:
                    out.append(pad + f"for ({z} = num_objects - 1; {z} >= 0; {z}--) {{")
                else:
                    out.append(pad + f"for ({z} = 0; {z} < num_objects; {z}++) {{")
                emit(it[2], depth + 1)
                out.append(pad + "}")
            else:
                cond = _condition_text(lines[it[1]], lines[it[1] + 1], p, sig)
                out.append(pad + f"if ({cond}) {{")
                emit(it[2], depth + 1)
                out.append(pad + "}")

    emit(items, 1)
    out.append("  return post_state;")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Parsing

_RE_HEADER = re.compile(
    r"^State\s+([\w-]+)\s*\(\s*State\s+pre_state((?:\s*,\s*int\s+\w+)*)\s*\)\s*\{$")
_RE_PARAM = re.compile(r"int\s+(\w+)")
_RE_COPY = re.compile(r"^post_state\s*=\s*pre_state\s*;$")
_RE_FOR_ASC = re.compile(
    r"^for\s*\(\s*(\w+)\s*=\s*0\s*;\s*(\w+)\s*<\s*num_objects\s*;\s*(\w+)\s*\+\+\s*\)\s*\{$")
_RE_FOR_DESC = re.compile(
    r"^for\s*\(\s*(\w+)\s*=\s*num_objects\s*-\s*1\s*;\s*(\w+)\s*>=\s*0\s*;\s*(\w+)\s*--\s*\)\s*\{$")
_RE_IF = re.compile(r"^if\s*\((.*)\)\s*\{$")
_RE_CLOSE = re.compile(r"^\}$")
_RE_RETURN = re.compile(r"^return\s+post_state\s*;$")
_RE_STATE_REF = re.compile(r"^(pre_state|post_state)\s*\(([^()]*)\)$")
_RE_ASSIGN = re.compile(r"^(.*?)\s*=\s*(.*?)\s*;$")
_RE_CONDITION = re.compile(r"^(.*?)\s*(==|<|>)\s*(.*?)$")


class _Parser:
    def __init__(self, text: str, sig: ModelSignature):
        self.sig = sig
        self.raw = text.splitlines()
        self.name = "model"
        self.latent_names: list[str] = []
        self.lines: list[Instruction] = []
        self.tags: list[int] = []
        self.stack: list[tuple] = []  # ("for", counter, asc, head) | ("if", jmp_line)

    def error(self, n: int, msg: str) -> TextSyntaxError:
        return TextSyntaxError(n + 1, msg)

    def reg(self, n: int, token: str) -> Reg:
        token = token.strip()
        m = _RE_STATE_REF.match(token)
        if m:
            bank = Bank.PRE if m.group(1) == "pre_state" else Bank.POST
            args = [a.strip() for a in m.group(2).split(",") if a.strip()]
            if not args:
                raise self.error(n, "state access needs at least one index")
            if len(args) == 1 and args[0].isdigit():
                return Reg.direct(bank, int(args[0]))
            if args[0] in self.latent_names:
                family = 0
                lat_args = args
                if len(self.sig.state_vars) != 1:
                    raise self.error(n, "state access must name its variable family")
            else:
                try:
                    family = self.sig.family_index(args[0])
                except Exception:
                    raise self.error(n, f"unknown state variable {args[0]!r}")
                lat_args = args[1:]
            latents = []
            for a in lat_args:
                if a not in self.latent_names:
                    raise self.error(n, f"unknown latent name {a!r}")
                latents.append(self.latent_names.index(a))
            return Reg.state(bank, family, latents)
        if token in self.latent_names:
            return Reg.latent(self.latent_names.index(token))
        raise self.error(n, f"unknown operand {token!r}")

    def emit(self, ins: Instruction, tag: int = Tag.PLAIN) -> None:
        self.lines.append(ins)
        self.tags.append(tag)

    def condition(self, n: int, expr: str) -> tuple[Instruction, int, int]:
        m = _RE_CONDITION.match(expr.strip())
        if not m:
            raise self.error(n, f"cannot parse condition {expr!r}")
        left, op, right = m.group(1).strip(), m.group(2), m.group(3).strip()
        if right in ("0", "1") and op == "==":
            zf, cf = (1, 0) if right == "0" else (0, 1)
            return Instruction(Opcode.TEST, a=self.reg(n, left)), zf, cf
        if right == "0" and op == ">":
            return Instruction(Opcode.TEST, a=self.reg(n, left)), 0, 1
        a, b = self.reg(n, left), self.reg(n, right)
        guards = {"==": (1, 0), ">": (0, 1), "<": (0, 0)}
        zf, cf = guards[op]
        return Instruction(Opcode.CMP, a=a, b=b), zf, cf

    def statement(self, n: int, stmt: str) -> None:
        m = _RE_ASSIGN.match(stmt)
        if not m:
            raise self.error(n, f"cannot parse statement {stmt!r}")
        lhs, rhs = m.group(1).strip(), m.group(2).strip()
        dst = self.reg(n, lhs)
        if rhs == f"{lhs} + 1" or rhs == f"{lhs} +1":
            self.emit(Instruction(Opcode.INC, a=dst))
            return
        if rhs == f"{lhs} - 1" or rhs == f"{lhs} -1":
            self.emit(Instruction(Opcode.DEC, a=dst))
            return
        if rhs == "num_objects - 1":
            self.emit(Instruction(Opcode.SET_CONST, a=dst, const=CONST_OMEGA_MINUS_1))
            return
        if rhs.isdigit():
            v = int(rhs)
            if v not in (0, 1):
                raise self.error(n, f"only constants 0 and 1 can be assigned, got {v}")
            self.emit(Instruction(Opcode.SET_CONST, a=dst, const=v))
            return
        self.emit(Instruction(Opcode.SET_REG, a=dst, b=self.reg(n, rhs)))

    def parse(self) -> Program:
        body_started = False
        header_seen = False
        closed_function = False
        for n, raw in enumerate(self.raw):
            s = raw.strip()
            if not s or s.startswith("//") or s.startswith("#"):
                continue
            if closed_function:
                raise self.error(n, "content after closing brace")
            if not header_seen:
                m = _RE_HEADER.match(s)
                if not m:
                    raise self.error(n, "expected a 'State name(State pre_state, ...) {' header")
                self.name = m.group(1)
                self.latent_names = _RE_PARAM.findall(m.group(2))
                header_seen = True
                continue
            if not body_started:
                if not _RE_COPY.match(s):
                    raise self.error(n, "expected 'post_state = pre_state;'")
                body_started = True
                continue
            m = _RE_FOR_ASC.match(s) or _RE_FOR_DESC.match(s)
            if m:
                if len({m.group(1), m.group(2), m.group(3)}) != 1:
                    raise self.error(n, "loop variable must match in all three positions")
                zname = m.group(1)
                if zname not in self.latent_names:
                    raise self.error(n, f"unknown latent name {zname!r}")
                z = self.latent_names.index(zname)
                asc = _RE_FOR_ASC.match(s) is not None
                head = len(self.lines)
                const = 0 if asc else CONST_OMEGA_MINUS_1
                self.emit(Instruction(Opcode.SET_CONST, a=Reg.latent(z), const=const),
                          Tag.FOR_HEAD)
                self.stack.append(("for", z, asc, head))
                continue
            m = _RE_IF.match(s)
            if m:
                cond, zf, cf = self.condition(n, m.group(1))
                self.emit(cond, Tag.IF_COND)
                self.stack.append(("if", len(self.lines)))
                self.emit(Instruction(Opcode.JMP, zf=zf, cf=cf, target=-1), Tag.IF_JMP)
                continue
            if _RE_CLOSE.match(s):
                if not self.stack:
                    closed_function = True
                    continue
                frame = self.stack.pop()
                if frame[0] == "if":
                    at = frame[1]
                    self.lines[at] = replace(self.lines[at], target=len(self.lines))
                else:
                    _, z, asc, head = frame
                    self.emit(Instruction(Opcode.INC if asc else Opcode.DEC,
                                          a=Reg.latent(z)), Tag.FOR_INC)
                    self.emit(Instruction(Opcode.JMP, zf=0, cf=0 if asc else 1,
                                          target=head + 1), Tag.FOR_JMP)
                continue
            if _RE_RETURN.match(s):
                self.emit(Instruction(Opcode.HALT))
                continue
            self.statement(n, s)
        if not header_seen:
            raise TextSyntaxError(0, "empty program text")
        if self.stack or not closed_function:
            raise TextSyntaxError(len(self.raw), "unclosed brace at end of input")
        return Program(
            capacity=len(self.lines),
            lines=tuple(self.lines),
            tags=tuple(self.tags),
            name=self.name,
            latent_names=tuple(self.latent_names),
        )


def parse_structured_text(text: str, sig: ModelSignature) -> Program:
    """Parse structured source text back into a program.

    Inverse of :func:`to_structured_text`: for any halt-terminated program
    the round trip reproduces the instruction lines exactly.
    """
    return _Parser(text, sig).parse()
