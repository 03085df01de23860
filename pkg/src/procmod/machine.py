"""Register machine executing state-transition models.

The register file is split into four banks: a read-only pre-state, a
writable post-state (initialised as a copy of the pre-state), the two
comparison flags ZF/CF, and a small bank of latent registers used as loop
counters, indices and action arguments.

State registers are grouped into *families* (one per k-ary state-variable
function); a family member is addressed either directly by flat index or
indirectly through a tuple of latent registers holding object indices.
Latent registers saturate into a one-cell sentinel band around
``[0, num_objects)``: indirect reads through a sentinel yield 0 and
indirect writes through one are dropped, which gives zero-padded
boundaries to programs that step an index off either end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping, Sequence

__all__ = [
    "Bank",
    "Opcode",
    "Reg",
    "Instruction",
    "StateVar",
    "ModelSignature",
    "MachineState",
    "MachineError",
    "StructuralError",
    "DimensionError",
    "GroundingError",
    "CONST_OMEGA_MINUS_1",
    "LATENT_SENTINEL_LOW",
    "init_state",
    "exec_instruction",
    "run",
    "read_indexed",
    "write_indexed",
    "step_bound",
    "compile_program",
]


class MachineError(Exception):
    """Base for all machine-level failures."""


class StructuralError(MachineError):
    """An instruction violates a bank access restriction."""


class DimensionError(MachineError):
    """Example or register-file dimensions do not match the signature."""


class GroundingError(MachineError):
    """A direct register index does not exist at the current object count."""


class Bank(IntEnum):
    PRE = 0
    POST = 1
    FLAGS = 2
    LATENT = 3


class Opcode(IntEnum):
    INC = 0
    DEC = 1
    TEST = 2
    SET_CONST = 3
    SET_REG = 4
    CMP = 5
    JMP = 6
    HALT = 7


# SET_CONST payloads: 0, 1, or the run-time value num_objects - 1 (used by
# descending loop heads, which cannot be expressed with 0/1 alone).
CONST_OMEGA_MINUS_1 = 2

LATENT_SENTINEL_LOW = -1


@dataclass(frozen=True, slots=True)
class StateVar:
    """One family of state variables: a k-ary function over world objects."""

    name: str
    arity: int
    domain: tuple[int, int]  # inclusive [lo, hi]

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise DimensionError(f"negative arity for {self.name}")
        lo, hi = self.domain
        if hi < lo:
            raise DimensionError(f"empty domain for {self.name}")


@dataclass(frozen=True)
class ModelSignature:
    """Shape of the register file for one modelled system.

    ``num_latent`` is the default latent-register count; individual action
    labels may need more (one per action argument) or carry an explicit
    override, resolved by :meth:`latent_count_for`.
    """

    num_objects: int
    state_vars: tuple[StateVar, ...]
    num_latent: int
    language: str = "ram"
    latent_overrides: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.num_objects < 1:
            raise DimensionError("signature needs at least one world object")
        if not self.state_vars:
            raise DimensionError("signature needs at least one state variable")
        names = [v.name for v in self.state_vars]
        if len(set(names)) != len(names):
            raise DimensionError("duplicate state-variable names")

    @property
    def state_size(self) -> int:
        return sum(self.num_objects ** v.arity for v in self.state_vars)

    def family_offset(self, family: int) -> int:
        off = 0
        for v in self.state_vars[:family]:
            off += self.num_objects ** v.arity
        return off

    def family_strides(self, family: int) -> tuple[int, ...]:
        arity = self.state_vars[family].arity
        return tuple(self.num_objects ** (arity - 1 - j) for j in range(arity))

    def family_index(self, name: str) -> int:
        for i, v in enumerate(self.state_vars):
            if v.name == name:
                return i
        raise GroundingError(f"unknown state variable {name!r}")

    def ground_index(self, family: int, objects: Sequence[int]) -> int:
        """Flat register index of one ground state variable.

        Families are laid out in declaration order, object tuples in
        row-major order, so the mapping is a bijection onto
        ``[0, state_size)``.
        """
        var = self.state_vars[family]
        if len(objects) != var.arity:
            raise DimensionError(
                f"{var.name} expects {var.arity} objects, got {len(objects)}"
            )
        idx = self.family_offset(family)
        for stride, o in zip(self.family_strides(family), objects):
            if not 0 <= o < self.num_objects:
                raise GroundingError(f"object index {o} out of range")
            idx += stride * o
        return idx

    def var_of_index(self, idx: int) -> tuple[str, tuple[int, ...]]:
        """Inverse of :meth:`ground_index`, for diagnostics."""
        if not 0 <= idx < self.state_size:
            raise GroundingError(f"register index {idx} out of range")
        for f, v in enumerate(self.state_vars):
            size = self.num_objects ** v.arity
            off = self.family_offset(f)
            if idx < off + size:
                rel = idx - off
                objs = []
                for stride in self.family_strides(f):
                    objs.append(rel // stride)
                    rel %= stride
                return v.name, tuple(objs)
        raise GroundingError(f"register index {idx} out of range")

    def family_domain(self, family: int) -> tuple[int, int]:
        return self.state_vars[family].domain

    def is_boolean(self, family: int) -> bool:
        return self.state_vars[family].domain == (0, 1)

    def latent_count_for(self, label: str, observed_arity: int = 0) -> int:
        if label in self.latent_overrides:
            return self.latent_overrides[label]
        return max(self.num_latent, observed_arity)


@dataclass(frozen=True, slots=True)
class Reg:
    """A register operand: latent, direct state, or latent-indexed state."""

    bank: Bank
    index: int | None = None
    family: int | None = None
    latents: tuple[int, ...] | None = None

    @staticmethod
    def latent(i: int) -> "Reg":
        return Reg(Bank.LATENT, index=i)

    @staticmethod
    def state(bank: Bank, family: int, latents: Sequence[int]) -> "Reg":
        return Reg(bank, family=family, latents=tuple(latents))

    @staticmethod
    def direct(bank: Bank, index: int) -> "Reg":
        return Reg(bank, index=index)

    @property
    def indirect(self) -> bool:
        return self.latents is not None


@dataclass(frozen=True, slots=True)
class Instruction:
    op: Opcode
    a: Reg | None = None
    b: Reg | None = None
    const: int = 0  # SET_CONST payload
    zf: int = 0  # jump guard
    cf: int = 0
    target: int = 0  # jump target line; == capacity while a conditional is open


@dataclass
class MachineState:
    """Register file of one execution. ``pre`` is a tuple and never mutated."""

    pre: tuple[int, ...]
    post: list[int]
    zf: int
    cf: int
    latent: list[int]
    step_count: int = 0
    truncated: bool = False

    def copy(self) -> "MachineState":
        return MachineState(
            self.pre, list(self.post), self.zf, self.cf, list(self.latent),
            self.step_count, self.truncated,
        )


def init_state(example, sig: ModelSignature, num_latent: int | None = None) -> MachineState:
    """Initial register file for one example.

    The post-state starts as a copy of the pre-state and FLAGS start at
    zero.  The action label's k arguments are bound to the *last* k latent
    registers (earlier ones stay zero and are free as loop counters), which
    is what lets a model iterate with z1 while reading its argument from z2.
    """
    pre = tuple(example.pre)
    if len(pre) != sig.state_size:
        raise DimensionError(
            f"example pre-state has {len(pre)} variables, signature has {sig.state_size}"
        )
    if len(example.post) != len(pre):
        raise DimensionError("example pre/post lengths differ")
    args = tuple(example.args)
    k = num_latent if num_latent is not None else sig.latent_count_for(example.label, len(args))
    if len(args) > k:
        raise DimensionError(
            f"label {example.label!r} carries {len(args)} arguments but only {k} latent registers exist"
        )
    latent = [0] * k
    for i, v in enumerate(args):
        if not 0 <= v < sig.num_objects:
            raise DimensionError(f"action argument {v} out of range")
        latent[k - len(args) + i] = v
    return MachineState(pre=pre, post=list(pre), zf=0, cf=0, latent=latent)


# ---------------------------------------------------------------------------
# Compiled form.  Each line becomes a small tuple dispatched by integer kind
# in a tight loop; operand addresses are pre-resolved to (base, strides,
# latent-ids) triples so indirect access costs one multiply-add per tuple
# component.

_K_SET_LAT_CONST = 0
_K_SET_LAT_SRC = 1
_K_INC_LAT = 2
_K_DEC_LAT = 3
_K_SET_POST_CONST = 4
_K_SET_POST_SRC = 5
_K_INC_POST = 6
_K_DEC_POST = 7
_K_TEST = 8
_K_CMP = 9
_K_JMP_IF = 10
_K_JMP_LOOP = 11
_K_HALT = 12

_SRC_LAT = 0
_SRC_PRE = 1
_SRC_POST = 2


def _addr_spec(reg: Reg, sig: ModelSignature, num_latent: int):
    if reg.indirect:
        var = sig.state_vars[reg.family]
        if len(reg.latents) != var.arity:
            raise DimensionError(
                f"{var.name} addressed with {len(reg.latents)} latents, arity is {var.arity}"
            )
        for li in reg.latents:
            if not 0 <= li < num_latent:
                raise DimensionError(f"latent register {li} out of range")
        return (sig.family_offset(reg.family), sig.family_strides(reg.family), reg.latents)
    if reg.index is None or not 0 <= reg.index < sig.state_size:
        raise GroundingError(
            f"direct state index {reg.index} does not exist for {sig.num_objects} objects"
        )
    return (reg.index, (), ())


def _family_of(reg: Reg, sig: ModelSignature) -> int:
    if reg.indirect:
        return reg.family
    name, _ = sig.var_of_index(reg.index)
    return sig.family_index(name)


def _src_spec(reg: Reg, sig: ModelSignature, num_latent: int):
    if reg.bank == Bank.LATENT:
        if not 0 <= reg.index < num_latent:
            raise DimensionError(f"latent register {reg.index} out of range")
        return (_SRC_LAT, reg.index)
    if reg.bank == Bank.PRE:
        return (_SRC_PRE, _addr_spec(reg, sig, num_latent))
    raise StructuralError("instruction reads a write-only post-state register")


def compile_program(lines: Sequence[Instruction], sig: ModelSignature,
                    num_latent: int, capacity: int | None = None) -> list[tuple]:
    """Lower instructions to the kernel's tuple form, validating bank access.

    Raises :class:`StructuralError` for reads of the post bank by test/cmp,
    writes to the pre bank, or malformed jumps, and :class:`GroundingError`
    when a direct index does not exist at this signature's object count.
    """
    cap = capacity if capacity is not None else len(lines)
    nobj = sig.num_objects
    code: list[tuple] = []
    for pc, ins in enumerate(lines):
        op = ins.op
        if op in (Opcode.INC, Opcode.DEC):
            r = ins.a
            if r.bank == Bank.LATENT:
                if not 0 <= r.index < num_latent:
                    raise DimensionError(f"latent register {r.index} out of range")
                code.append(((_K_INC_LAT if op == Opcode.INC else _K_DEC_LAT), r.index))
            elif r.bank == Bank.POST:
                lo, hi = sig.family_domain(_family_of(r, sig))
                kind = _K_INC_POST if op == Opcode.INC else _K_DEC_POST
                code.append((kind, _addr_spec(r, sig, num_latent), lo, hi))
            else:
                raise StructuralError("inc/dec may not target the pre-state bank")
        elif op == Opcode.SET_CONST:
            v = nobj - 1 if ins.const == CONST_OMEGA_MINUS_1 else ins.const
            r = ins.a
            if r.bank == Bank.LATENT:
                code.append((_K_SET_LAT_CONST, r.index, v))
            elif r.bank == Bank.POST:
                lo, hi = sig.family_domain(_family_of(r, sig))
                code.append((_K_SET_POST_CONST, _addr_spec(r, sig, num_latent), v, lo, hi))
            else:
                raise StructuralError("set may not target the pre-state bank")
        elif op == Opcode.SET_REG:
            dst, src = ins.a, ins.b
            s = _src_spec(src, sig, num_latent)
            if dst.bank == Bank.LATENT:
                code.append((_K_SET_LAT_SRC, dst.index, s))
            elif dst.bank == Bank.POST:
                lo, hi = sig.family_domain(_family_of(dst, sig))
                code.append((_K_SET_POST_SRC, _addr_spec(dst, sig, num_latent), s, lo, hi))
            else:
                raise StructuralError("set may not target the pre-state bank")
        elif op == Opcode.TEST:
            code.append((_K_TEST, _src_spec(ins.a, sig, num_latent)))
        elif op == Opcode.CMP:
            code.append((_K_CMP, _src_spec(ins.a, sig, num_latent), _src_spec(ins.b, sig, num_latent)))
        elif op == Opcode.JMP:
            if ins.target == pc:
                raise StructuralError(f"line {pc}: jump to itself")
            if ins.target < pc:
                prev = lines[pc - 1] if pc else None
                if prev is None or prev.op not in (Opcode.INC, Opcode.DEC) \
                        or prev.a.bank != Bank.LATENT:
                    raise StructuralError(
                        f"line {pc}: backward jump without a counter update before it"
                    )
                asc = 1 if prev.op == Opcode.INC else 0
                code.append((_K_JMP_LOOP, prev.a.index, asc, ins.target))
            else:
                if ins.target > cap:
                    raise StructuralError(f"line {pc}: jump target beyond capacity")
                code.append((_K_JMP_IF, ins.zf, ins.cf, ins.target))
        elif op == Opcode.HALT:
            code.append((_K_HALT,))
        else:  # pragma: no cover - enum is closed
            raise StructuralError(f"unknown opcode {op}")
    return code


def _resolve(spec, lat, nobj) -> int:
    """Flat address of an indirect access, or -1 for a sentinel component."""
    a, strides, ids = spec
    for k in range(len(strides)):
        v = lat[ids[k]]
        if 0 <= v < nobj:
            a += strides[k] * v
        else:
            return -1
    return a


def _value(src, lat, pre, nobj) -> int:
    if src[0] == _SRC_LAT:
        return lat[src[1]]
    a = _resolve(src[1], lat, nobj)
    return pre[a] if a >= 0 else 0


def run_compiled(code, pre, post, lat, nobj, limit,
                 watch: int = -1, expected=None, zf: int = 0, cf: int = 0):
    """Execute compiled code in place.

    Returns ``(zf, cf, steps, truncated, w_exec, w_changed, w_mismatch,
    w_jumped)`` where the ``w_*`` entries describe the watched line: how
    often it executed, whether any of its writes changed a register,
    whether any write disagreed with ``expected`` (a post-state vector),
    and whether a watched jump was ever taken.
    """
    pc = 0
    steps = 0
    n = len(code)
    w_exec = 0
    w_changed = False
    w_mismatch = False
    w_jumped = False
    while pc < n:
        if steps >= limit:
            return zf, cf, steps, True, w_exec, w_changed, w_mismatch, w_jumped
        steps += 1
        ins = code[pc]
        k = ins[0]
        watching = pc == watch
        if watching:
            w_exec += 1
        if k == _K_SET_POST_SRC:
            a = _resolve(ins[1], lat, nobj)
            if a >= 0:
                v = _value(ins[2], lat, pre, nobj)
                res = v
                lo, hi = ins[3], ins[4]
                v = lo if v < lo else (hi if v > hi else v)
                if watching:
                    if v != post[a]:
                        w_changed = True
                    if expected is not None and v != expected[a]:
                        w_mismatch = True
                        return zf, cf, steps, False, w_exec, w_changed, True, w_jumped
                post[a] = v
            else:
                res = _value(ins[2], lat, pre, nobj)
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_SET_POST_CONST:
            a = _resolve(ins[1], lat, nobj)
            res = ins[2]
            if a >= 0:
                v = res
                lo, hi = ins[3], ins[4]
                v = lo if v < lo else (hi if v > hi else v)
                if watching:
                    if v != post[a]:
                        w_changed = True
                    if expected is not None and v != expected[a]:
                        w_mismatch = True
                        return zf, cf, steps, False, w_exec, w_changed, True, w_jumped
                post[a] = v
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_SET_LAT_CONST:
            res = ins[2]
            if watching and lat[ins[1]] != res:
                w_changed = True
            lat[ins[1]] = res
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_SET_LAT_SRC:
            res = _value(ins[2], lat, pre, nobj)
            v = -1 if res < -1 else (nobj if res > nobj else res)
            if watching and lat[ins[1]] != v:
                w_changed = True
            lat[ins[1]] = v
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_INC_LAT:
            res = lat[ins[1]] + 1
            v = nobj if res > nobj else res
            if watching and v != lat[ins[1]]:
                w_changed = True
            lat[ins[1]] = v
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_DEC_LAT:
            res = lat[ins[1]] - 1
            v = -1 if res < -1 else res
            if watching and v != lat[ins[1]]:
                w_changed = True
            lat[ins[1]] = v
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_INC_POST or k == _K_DEC_POST:
            a = _resolve(ins[1], lat, nobj)
            if a >= 0:
                res = post[a] + (1 if k == _K_INC_POST else -1)
                lo, hi = ins[2], ins[3]
                v = lo if res < lo else (hi if res > hi else res)
                if watching:
                    if v != post[a]:
                        w_changed = True
                    if expected is not None and v != expected[a]:
                        w_mismatch = True
                        return zf, cf, steps, False, w_exec, w_changed, True, w_jumped
                post[a] = v
            else:
                res = 1 if k == _K_INC_POST else -1
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_TEST:
            res = _value(ins[1], lat, pre, nobj)
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_CMP:
            res = _value(ins[1], lat, pre, nobj) - _value(ins[2], lat, pre, nobj)
            zf = 1 if res == 0 else 0
            cf = 1 if res > 0 else 0
        elif k == _K_JMP_IF:
            # Guard semantics: fall through into the body only when FLAGS
            # equal the guard pattern, otherwise skip to the target.
            if zf != ins[1] or cf != ins[2]:
                if watching:
                    w_jumped = True
                pc = ins[3]
                continue
        elif k == _K_JMP_LOOP:
            # Loop-closing jump: repeat while the counter updated on the
            # previous line is still inside [0, num_objects).
            v = lat[ins[1]]
            if (v < nobj) if ins[2] else (v >= 0):
                if watching:
                    w_jumped = True
                pc = ins[3]
                continue
        else:  # _K_HALT
            break
        pc += 1
    return zf, cf, steps, False, w_exec, w_changed, w_mismatch, w_jumped


def _loop_depth(lines: Sequence[Instruction]) -> int:
    """Maximum loop-nesting depth, from backward-jump spans."""
    spans = []
    for j, ins in enumerate(lines):
        if ins.op == Opcode.JMP and ins.target < j:
            spans.append((ins.target, j))
    depth = 0
    for lo, hi in spans:
        d = 1 + sum(1 for lo2, hi2 in spans if lo2 < lo and hi < hi2)
        depth = max(depth, d)
    return depth


def step_bound(lines: Sequence[Instruction], sig: ModelSignature,
               capacity: int | None = None) -> int:
    """Analytic halting bound for shape-conforming programs.

    Every loop iterates over the world objects, so a program with nesting
    depth d halts within ``lines * (num_objects + 2) ** d`` steps.
    """
    n = capacity if capacity is not None else max(len(lines), 1)
    n = max(n, 1)
    return n * (sig.num_objects + 2) ** _loop_depth(lines)


def run(program, state: MachineState, sig: ModelSignature,
        step_limit: int | None = None, compiled=None) -> MachineState:
    """Execute a program on a fresh copy of ``state``.

    ``program`` needs ``lines`` and ``capacity`` attributes.  Execution
    ends at a halt instruction, by falling past the last defined line
    (implicit return), or after ``step_limit`` steps, in which case the
    result carries ``truncated=True``.  Without an explicit limit the
    analytic bound for terminating programs is used.
    """
    out = state.copy()
    code = compiled if compiled is not None else compile_program(
        program.lines, sig, len(out.latent), program.capacity)
    limit = step_limit if step_limit is not None else step_bound(
        program.lines, sig, program.capacity) + 1
    zf, cf, steps, truncated, *_ = run_compiled(
        code, out.pre, out.post, out.latent, sig.num_objects, limit,
        zf=out.zf, cf=out.cf)
    out.zf, out.cf = zf, cf
    out.step_count += steps
    out.truncated = truncated
    return out


def exec_instruction(state: MachineState, instr: Instruction, sig: ModelSignature,
                     line: int = 0) -> tuple[MachineState, int | None]:
    """Execute one instruction; returns the new state and the line delta.

    The delta is +1 for fall-through, ``target - line`` for a taken jump,
    and ``None`` for a halt.
    """
    out = state.copy()
    if instr.op == Opcode.HALT:
        out.step_count += 1
        return out, None
    if instr.op == Opcode.JMP:
        if instr.target < line:
            # Loop closer: condition is the counter from the preceding update.
            raise StructuralError(
                "single-step execution of a loop-closing jump needs program context"
            )
        out.step_count += 1
        jumped = state.zf != instr.zf or state.cf != instr.cf
        return out, (instr.target - line) if jumped else 1
    code = compile_program([instr], sig, len(out.latent), capacity=1)
    zf, cf, steps, *_ = run_compiled(
        code, out.pre, out.post, out.latent, sig.num_objects, limit=2,
        zf=state.zf, cf=state.cf)
    out.zf, out.cf = zf, cf
    out.step_count += steps
    return out, 1


def read_indexed(state: MachineState, bank: Bank, family: int,
                 latent_ids: Sequence[int], sig: ModelSignature) -> int:
    """Read a state register through latent indices; sentinels read as 0."""
    if bank not in (Bank.PRE, Bank.POST):
        raise StructuralError("indexed access targets only pre/post banks")
    spec = (sig.family_offset(family), sig.family_strides(family), tuple(latent_ids))
    a = _resolve(spec, state.latent, sig.num_objects)
    if a < 0:
        return 0
    return state.pre[a] if bank == Bank.PRE else state.post[a]


def write_indexed(state: MachineState, family: int, latent_ids: Sequence[int],
                  value: int, sig: ModelSignature) -> MachineState:
    """Write a post-state register through latent indices; sentinel writes drop."""
    spec = (sig.family_offset(family), sig.family_strides(family), tuple(latent_ids))
    a = _resolve(spec, state.latent, sig.num_objects)
    if a >= 0:
        lo, hi = sig.family_domain(family)
        state.post[a] = min(max(value, lo), hi)
    return state
