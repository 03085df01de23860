"""Target languages as program spaces, plus the STRIPS schema bridge.

A :class:`ProgramSpace` turns a partial program into the ordered list of
grammar-legal growth steps for its next undefined line.  Four languages are
supported:

* ``ram`` - the full structured space: latent/state assignments,
  conditionals over register tests and comparisons, object-iterating loops.
* ``strips`` - nested conditionals over ground-atom tests with a block of
  0/1 assignments inside; converts to planning operators.
* ``strips_quantified`` - the STRIPS space plus object-iterating loops, for
  actions with universally quantified conditional effects.
* ``ca1d`` - one-dimensional cellular automata: a forced loop prologue that
  positions a left/centre/right window, then per-pattern conditionals.

Growth steps are produced in a fixed canonical order and obey canonical
form: consecutive sibling conditionals ascend, nested conditions ascend and
never re-test a register already tested on their path, and assignment runs
ascend.  These normalisations drop only reorderings of programs the space
already contains.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Sequence

from .machine import (
    Bank,
    Instruction,
    ModelSignature,
    Opcode,
    Reg,
)
from .program import MalformedProgramError, Program, Tag

__all__ = [
    "LANGUAGES",
    "ProgramSpace",
    "Unit",
    "GrammarState",
    "Atom",
    "PredicateSignature",
    "StripsSchema",
    "SchemaError",
    "ground_state_index",
    "candidate_instructions",
    "strips_schema_from_program",
    "schema_to_program",
    "schema_to_pddl_text",
    "apply_schema",
    "ca_rule_table",
    "ca_signature",
]

LANGUAGES = ("ram", "strips", "strips_quantified", "ca1d")


def ground_state_index(pred: int | str, objects: Sequence[int], sig: ModelSignature) -> int:
    """Flat register index of a ground atom (family by position or name)."""
    family = pred if isinstance(pred, int) else sig.family_index(pred)
    return sig.ground_index(family, objects)


def ca_rule_table(wolfram: int) -> tuple[int, ...]:
    """8-entry update table of a one-dimensional automaton rule.

    ``table[b]`` is bit ``b`` of the rule number, where ``b`` reads the
    (left, centre, right) neighbourhood as a binary number.
    """
    if not 0 <= wolfram <= 255:
        raise ValueError(f"rule number {wolfram} out of range 0..255")
    return tuple((wolfram >> b) & 1 for b in range(8))


def ca_signature(cells: int) -> ModelSignature:
    from .machine import StateVar

    return ModelSignature(
        num_objects=cells,
        state_vars=(StateVar("cell", 1, (0, 1)),),
        num_latent=3,
        language="ca1d",
    )


# ---------------------------------------------------------------------------
# Grammar state and growth units


@dataclass
class _Frame:
    kind: str  # "top" | "for" | "if"
    content: int = 0
    mode: str | None = None  # conditional bodies: "cond" | "assign"
    counter: int = -1
    asc: bool = True
    head: int = -1
    cond_index: int = -1
    path_regs: frozenset = frozenset()
    last_sibling_cond: int = -1
    last_assign: int = -1


@dataclass
class GrammarState:
    frames: list[_Frame]
    max_depth: int = 0
    after_loop: bool = False  # ca1d: the one loop has closed

    @property
    def top(self) -> _Frame:
        return self.frames[-1]

    @property
    def counters(self) -> set[int]:
        return {f.counter for f in self.frames if f.kind == "for"}

    @property
    def loop_depth(self) -> int:
        return sum(1 for f in self.frames if f.kind == "for")

    def completion_cost(self) -> int:
        cost = 0
        for f in self.frames:
            if f.kind == "for":
                cost += 2
            if f.kind != "top" and f.content == 0:
                cost += 1
        return cost


@dataclass(frozen=True)
class Unit:
    """One growth step: a plain line, a structure opener/closer, or halt."""

    kind: str  # "instr" | "if" | "for" | "close_if" | "close_for" | "halt"
    instr: Instruction | None = None
    zf: int = 0
    cf: int = 0
    cond_index: int = -1
    reg_id: tuple | None = None
    counter: int = -1
    asc: bool = True
    assign_rank: int = -1
    writes_post: bool = False
    writes_latent: bool = False
    r2_guarded: bool = False  # top-level condition that must hold on every example

    @property
    def line_cost(self) -> int:
        return {"instr": 1, "halt": 1, "if": 2, "for": 1, "close_if": 0, "close_for": 2}[self.kind]


@dataclass(frozen=True)
class _Cond:
    index: int
    instr: Instruction
    zf: int
    cf: int
    reg_id: tuple


def _is_assignment(ins: Instruction) -> bool:
    return ins.op == Opcode.SET_CONST and ins.a.bank == Bank.POST


class ProgramSpace:
    """Grammar of one target language over a fixed signature."""

    def __init__(self, language: str, signature: ModelSignature, num_latent: int,
                 label: str = "model"):
        if language not in LANGUAGES:
            raise ValueError(f"unknown language {language!r}")
        if language == "ca1d" and num_latent < 3:
            raise ValueError("the cellular-automaton space needs 3 latent registers")
        self.language = language
        self.signature = signature
        self.num_latent = num_latent
        self.label = label

    @classmethod
    def for_label(cls, language: str, sig: ModelSignature, label: str,
                  observed_arity: int = 0, num_latent: int | None = None) -> "ProgramSpace":
        k = num_latent if num_latent is not None else sig.latent_count_for(label, observed_arity)
        if language == "ca1d":
            k = max(k, 3)
        return cls(language, sig, k, label)

    def initial_program(self, capacity: int) -> Program:
        return Program.empty(capacity, self.num_latent, name=self.label)

    # -- enumerations ------------------------------------------------------

    @cached_property
    def atoms(self) -> tuple[tuple[int, tuple[int, ...]], ...]:
        """(family, latent-tuple) pairs in declaration/row-major order."""
        out = []
        for f, var in enumerate(self.signature.state_vars):
            for tau in product(range(self.num_latent), repeat=var.arity):
                out.append((f, tau))
        return tuple(out)

    def _atom_reg(self, bank: Bank, atom) -> Reg:
        family, tau = atom
        return Reg.state(bank, family, tau)

    @cached_property
    def conditions(self) -> tuple[_Cond, ...]:
        """Canonically ordered conditions: ==0 tests, >0/==1 tests, then
        register comparisons (==, <, >)."""
        lang = self.language
        tests: list[tuple[Reg, tuple]] = []
        if lang == "ram":
            for i in range(self.num_latent):
                tests.append((Reg.latent(i), ("lat", i)))
        if lang == "ca1d":
            for i in range(3):
                tests.append((self._atom_reg(Bank.PRE, (0, (i,))), ("state", 0, (i,))))
        else:
            for atom in self.atoms:
                tests.append((self._atom_reg(Bank.PRE, atom), ("state",) + (atom[0], atom[1])))
        conds: list[_Cond] = []
        for reg, rid in tests:
            conds.append(_Cond(len(conds), Instruction(Opcode.TEST, a=reg), 1, 0, rid))
        for reg, rid in tests:
            conds.append(_Cond(len(conds), Instruction(Opcode.TEST, a=reg), 0, 1, rid))
        if lang == "ram":
            for zf, cf in ((1, 0), (0, 0), (0, 1)):  # ==, <, >
                for i in range(self.num_latent):
                    for j in range(i + 1, self.num_latent):
                        conds.append(_Cond(
                            len(conds),
                            Instruction(Opcode.CMP, a=Reg.latent(i), b=Reg.latent(j)),
                            zf, cf, ("cmp", i, j)))
        return tuple(conds)

    @cached_property
    def plain_units(self) -> tuple[Unit, ...]:
        """Canonically ordered non-structural lines (post writes first)."""
        lang = self.language
        units: list[Unit] = []
        if lang == "ram":
            for d in self.atoms:
                for s in self.atoms:
                    units.append(Unit("instr", Instruction(
                        Opcode.SET_REG, a=self._atom_reg(Bank.POST, d),
                        b=self._atom_reg(Bank.PRE, s)), writes_post=True))
            for rank, d in enumerate(self.atoms):
                for v in (0, 1):
                    units.append(Unit("instr", Instruction(
                        Opcode.SET_CONST, a=self._atom_reg(Bank.POST, d), const=v),
                        writes_post=True, assign_rank=rank))
            for d in self.atoms:
                for j in range(self.num_latent):
                    units.append(Unit("instr", Instruction(
                        Opcode.SET_REG, a=self._atom_reg(Bank.POST, d), b=Reg.latent(j)),
                        writes_post=True))
            for i in range(self.num_latent):
                for j in range(self.num_latent):
                    if i != j:
                        units.append(Unit("instr", Instruction(
                            Opcode.SET_REG, a=Reg.latent(i), b=Reg.latent(j)),
                            writes_latent=True, counter=i))
            for i in range(self.num_latent):
                for v in (0, 1):
                    units.append(Unit("instr", Instruction(
                        Opcode.SET_CONST, a=Reg.latent(i), const=v),
                        writes_latent=True, counter=i))
            for op in (Opcode.INC, Opcode.DEC):
                for i in range(self.num_latent):
                    units.append(Unit("instr", Instruction(op, a=Reg.latent(i)),
                                      writes_latent=True, counter=i))
            for op in (Opcode.INC, Opcode.DEC):
                for d in self.atoms:
                    units.append(Unit("instr", Instruction(op, a=self._atom_reg(Bank.POST, d)),
                                      writes_post=True))
        elif lang in ("strips", "strips_quantified"):
            for rank, d in enumerate(self.atoms):
                for v in (1, 0):
                    units.append(Unit("instr", Instruction(
                        Opcode.SET_CONST, a=self._atom_reg(Bank.POST, d), const=v),
                        writes_post=True, assign_rank=rank))
        else:  # ca1d: only the centre cell is written
            for v in (0, 1):
                units.append(Unit("instr", Instruction(
                    Opcode.SET_CONST, a=self._atom_reg(Bank.POST, (0, (0,))), const=v),
                    writes_post=True, assign_rank=0))
        return tuple(units)

    @cached_property
    def _ca_prologue(self) -> tuple[Unit, ...]:
        # z2 trails the loop counter by one cell, z3 leads it by one.
        return (
            Unit("for", counter=0, asc=True),
            Unit("instr", Instruction(Opcode.SET_REG, a=Reg.latent(1), b=Reg.latent(0)),
                 writes_latent=True),
            Unit("instr", Instruction(Opcode.DEC, a=Reg.latent(1)), writes_latent=True),
            Unit("instr", Instruction(Opcode.SET_REG, a=Reg.latent(2), b=Reg.latent(0)),
                 writes_latent=True),
            Unit("instr", Instruction(Opcode.INC, a=Reg.latent(2)), writes_latent=True),
        )

    # -- replay ------------------------------------------------------------

    def derive(self, p: Program) -> GrammarState:
        """Reconstruct the open-structure stack of a partial program."""
        st = GrammarState(frames=[_Frame("top")])
        pending = set(p.pending)
        open_ifs: list[tuple[int, int | None]] = []  # (frame idx, close line)
        i = 0
        depth = 0
        while True:
            while open_ifs and open_ifs[-1][1] == i:
                open_ifs.pop()
                closed = st.frames.pop()
                parent = st.top
                parent.content += 1
                parent.last_sibling_cond = closed.cond_index
                parent.last_assign = -1
                if parent.mode is None and parent.kind == "if":
                    parent.mode = "cond"
            if i >= p.frontier:
                break
            tag = p.tags[i]
            ins = p.lines[i]
            if tag == Tag.FOR_HEAD:
                st.frames.append(_Frame(
                    "for", counter=ins.a.index,
                    asc=(ins.const == 0), head=i,
                    path_regs=st.top.path_regs))
                depth += 1
                st.max_depth = max(st.max_depth, depth)
                i += 1
            elif tag == Tag.IF_COND:
                jmp = p.lines[i + 1]
                cond_index, reg_id = self._identify_condition(ins, jmp)
                parent = st.top
                if parent.mode is None and parent.kind == "if":
                    parent.mode = "cond"
                frame = _Frame(
                    "if", cond_index=cond_index,
                    path_regs=parent.path_regs | {reg_id})
                st.frames.append(frame)
                if i + 1 in pending:
                    open_ifs.append((len(st.frames) - 1, None))
                else:
                    open_ifs.append((len(st.frames) - 1, jmp.target))
                i += 2
            elif tag == Tag.FOR_INC:
                closed = st.frames.pop()
                depth -= 1
                parent = st.top
                parent.content += 1
                parent.last_sibling_cond = -1
                parent.last_assign = -1
                if parent.mode is None and parent.kind == "if":
                    parent.mode = "cond"
                if closed.kind != "for":  # pragma: no cover - grammar keeps nesting
                    raise MalformedProgramError("loop closed across a conditional")
                if self.language == "ca1d" and len(st.frames) == 1:
                    st.after_loop = True
                i += 2
            else:
                f = st.top
                f.content += 1
                f.last_sibling_cond = -1
                if _is_assignment(ins):
                    f.last_assign = self._assign_rank(ins)
                    if f.mode is None and f.kind == "if":
                        f.mode = "assign"
                else:
                    f.last_assign = -1
                i += 1
        return st

    def _identify_condition(self, cond: Instruction, jmp: Instruction) -> tuple[int, tuple]:
        for c in self.conditions:
            if c.instr == cond and (c.zf, c.cf) == (jmp.zf, jmp.cf):
                return c.index, c.reg_id
        # Hand-built programs may test things the grammar would not propose.
        if cond.op == Opcode.TEST:
            r = cond.a
            rid = ("lat", r.index) if r.bank == Bank.LATENT else ("state", r.family, r.latents)
        else:
            rid = ("cmp", cond.a, cond.b)
        return -1, rid

    def _assign_rank(self, ins: Instruction) -> int:
        if ins.a.indirect:
            for rank, atom in enumerate(self.atoms):
                if atom == (ins.a.family, ins.a.latents):
                    return rank
        return -1

    # -- candidate generation ----------------------------------------------

    def units(self, p: Program, st: GrammarState | None = None) -> list[Unit]:
        """Grammar-legal growth steps at the frontier, in canonical order."""
        st = st if st is not None else self.derive(p)
        lang = self.language
        if lang == "ca1d" and p.frontier < 5 and not st.after_loop:
            if p.frontier >= p.capacity:
                return []
            if p.capacity < 7:
                return []
            return [self._ca_prologue[p.frontier]]

        out: list[Unit] = []
        frames = st.frames
        top = st.top
        cost = st.completion_cost()
        room = p.capacity - p.frontier

        def fits(unit_lines: int, opens_if: bool = False, opens_for: bool = False) -> bool:
            c = cost
            if top.kind != "top" and top.content == 0 and unit_lines > 0:
                c -= 1
            if opens_if:
                c += 1
            if opens_for:
                c += 3
            return unit_lines + c <= room

        in_loop = any(f.kind == "for" for f in frames)
        mode = top.mode if top.kind == "if" else None

        allow_plain = False
        allow_if = False
        allow_for = False
        allow_halt = False
        if lang == "ram":
            allow_plain = True
            allow_if = True
            allow_for = True
            allow_halt = True
        elif lang == "strips":
            allow_plain = mode != "cond"
            allow_if = mode != "assign"
            allow_halt = top.kind == "top"
        elif lang == "strips_quantified":
            allow_plain = mode != "cond"
            allow_if = mode != "assign"
            allow_for = top.kind != "if" or mode != "assign"
            allow_halt = top.kind == "top"
        else:  # ca1d
            if st.after_loop:
                allow_halt = True
            else:
                allow_plain = top.kind == "if" and mode != "cond" and top.content == 0
                allow_if = in_loop and mode != "assign"

        if allow_plain:
            counters = st.counters
            for u in self.plain_units:
                if u.writes_latent and u.counter in counters:
                    continue
                if u.assign_rank >= 0 and top.last_assign >= 0 \
                        and u.assign_rank <= top.last_assign:
                    continue
                if fits(1):
                    out.append(u)

        if allow_if:
            floor = top.last_sibling_cond
            if top.kind == "if":
                floor = max(floor, top.cond_index)
            for c in self.conditions:
                if c.index <= floor:
                    continue
                if c.reg_id in top.path_regs:
                    continue
                if fits(2, opens_if=True):
                    out.append(Unit("if", instr=c.instr, zf=c.zf, cf=c.cf,
                                    cond_index=c.index, reg_id=c.reg_id,
                                    r2_guarded=(lang in ("strips", "strips_quantified")
                                                and not in_loop)))

        if allow_for:
            counters = st.counters
            for i in range(self.num_latent):
                if i in counters:
                    continue
                for asc in (True, False):
                    if lang == "strips_quantified" and not asc:
                        continue
                    if fits(1, opens_for=True):
                        out.append(Unit("for", counter=i, asc=asc))

        if top.kind == "if" and top.content > 0:
            out.append(Unit("close_if"))
        if top.kind == "for" and top.content > 0:
            out.append(Unit("close_for", counter=top.counter, asc=top.asc))

        if allow_halt and fits(1):
            out.append(Unit("halt", instr=Instruction(Opcode.HALT)))
        return out

    def apply(self, p: Program, unit: Unit, st: GrammarState | None = None) -> Program:
        if unit.kind == "instr":
            return p.append(unit.instr)
        if unit.kind == "halt":
            return p.append(Instruction(Opcode.HALT))
        if unit.kind == "if":
            return p.open_if(unit.instr, unit.zf, unit.cf)
        if unit.kind == "for":
            return p.open_for(unit.counter, unit.asc)
        if unit.kind == "close_if":
            return p.close_if()
        st = st if st is not None else self.derive(p)
        frame = st.top
        return p.close_for(frame.counter, frame.asc, frame.head)

    def watch_line(self, p: Program, unit: Unit) -> int:
        """Line whose dynamic behaviour decides the unit's pruning checks."""
        if unit.kind in ("instr", "halt", "for"):
            return p.frontier
        if unit.kind == "if":
            return p.frontier + 1
        return -1


def candidate_instructions(space: ProgramSpace, p: Program) -> list[Instruction]:
    """First new instruction of each growth step (conditional closers write
    no new line, so they have no entry here)."""
    st = space.derive(p)
    out = []
    for u in space.units(p, st):
        if u.kind == "close_if":
            continue
        if u.kind == "close_for":
            op = Opcode.INC if st.top.asc else Opcode.DEC
            out.append(Instruction(op, a=Reg.latent(st.top.counter)))
        elif u.kind == "for":
            const = 0 if u.asc else 2
            out.append(Instruction(Opcode.SET_CONST, a=Reg.latent(u.counter), const=const))
        else:
            out.append(u.instr)
    return out


# ---------------------------------------------------------------------------
# STRIPS schemas


class SchemaError(Exception):
    pass


@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[str, ...]

    def text(self) -> str:
        return f"({self.pred}{''.join(' ' + a for a in self.args)})"


@dataclass(frozen=True)
class PredicateSignature:
    name: str
    arity: int


@dataclass(frozen=True)
class StripsSchema:
    """A planning operator: parameters, preconditions and add/delete effects.

    Negated preconditions (tests against 0) are kept separately; delete
    effects must appear among the positive preconditions and the effect
    sets must not overlap.
    """

    name: str
    parameters: tuple[str, ...]
    pre_pos: tuple[Atom, ...]
    pre_neg: tuple[Atom, ...]
    eff_pos: tuple[Atom, ...]
    eff_neg: tuple[Atom, ...]

    def __post_init__(self) -> None:
        if set(self.eff_pos) & set(self.eff_neg):
            raise SchemaError("an atom is both added and deleted")
        missing = set(self.eff_neg) - set(self.pre_pos)
        if missing:
            raise SchemaError(f"delete effects not among preconditions: {missing}")


def _param_names(p: Program) -> tuple[str, ...]:
    return tuple("?" + n for n in p.latent_names)


def strips_schema_from_program(p: Program, sig: ModelSignature) -> StripsSchema:
    """Read a planning operator off a conforming program.

    The program must be one nested chain of ground-atom conditions with the
    assignment block innermost; assignments to 1 become add effects,
    assignments to 0 delete effects, and conditions become (possibly
    negated) preconditions.
    """
    from .program import _structure

    params = _param_names(p)

    def atom_of(reg: Reg) -> Atom:
        if not reg.indirect:
            raise MalformedProgramError("operator programs address state through latents")
        name = sig.state_vars[reg.family].name
        return Atom(name, tuple(params[i] for i in reg.latents))

    lines = p.lines
    drop = 1 if (lines and lines[-1].op == Opcode.HALT) else 0
    items = _structure(p, 0, len(lines) - drop)
    pre_pos: list[Atom] = []
    pre_neg: list[Atom] = []
    eff_pos: list[Atom] = []
    eff_neg: list[Atom] = []

    def walk(items: list) -> None:
        ifs = [it for it in items if it[0] == "if"]
        plains = [it for it in items if it[0] == "line"]
        if any(it[0] == "for" for it in items):
            raise MalformedProgramError("operator programs contain no loops")
        if ifs and plains:
            raise MalformedProgramError("conditions and assignments mix at one level")
        if len(ifs) > 1:
            raise MalformedProgramError("sibling conditionals do not form one operator")
        if ifs:
            cond = lines[ifs[0][1]]
            jmp = lines[ifs[0][1] + 1]
            if cond.op != Opcode.TEST or cond.a.bank != Bank.PRE:
                raise MalformedProgramError("operator conditions test pre-state atoms")
            if (jmp.zf, jmp.cf) == (0, 1):
                pre_pos.append(atom_of(cond.a))
            elif (jmp.zf, jmp.cf) == (1, 0):
                pre_neg.append(atom_of(cond.a))
            else:
                raise MalformedProgramError("operator conditions are ==0 or ==1")
            walk(ifs[0][2])
            return
        for it in plains:
            ins = lines[it[1]]
            if ins.op == Opcode.HALT:
                continue
            if not _is_assignment(ins):
                raise MalformedProgramError("operator effects are 0/1 assignments")
            (eff_pos if ins.const == 1 else eff_neg).append(atom_of(ins.a))

    walk(items)
    return StripsSchema(p.name, params, tuple(pre_pos), tuple(pre_neg),
                        tuple(eff_pos), tuple(eff_neg))


def schema_to_program(schema: StripsSchema, sig: ModelSignature,
                      capacity: int | None = None) -> Program:
    """Compile an operator back to its canonical chain program."""
    k = len(schema.parameters)
    names = tuple(n.lstrip("?") for n in schema.parameters)
    n_lines = 2 * (len(schema.pre_pos) + len(schema.pre_neg)) \
        + len(schema.eff_pos) + len(schema.eff_neg) + 1
    cap = capacity if capacity is not None else n_lines
    p = Program.empty(cap, k, name=schema.name, latent_names=names)

    def reg_of(atom: Atom, bank: Bank) -> Reg:
        family = sig.family_index(atom.pred)
        lat = tuple(schema.parameters.index(a) for a in atom.args)
        return Reg.state(bank, family, lat)

    opened = 0
    for atom in schema.pre_pos:
        p = p.open_if(Instruction(Opcode.TEST, a=reg_of(atom, Bank.PRE)), 0, 1)
        opened += 1
    for atom in schema.pre_neg:
        p = p.open_if(Instruction(Opcode.TEST, a=reg_of(atom, Bank.PRE)), 1, 0)
        opened += 1
    for atom in schema.eff_pos:
        p = p.append(Instruction(Opcode.SET_CONST, a=reg_of(atom, Bank.POST), const=1))
    for atom in schema.eff_neg:
        p = p.append(Instruction(Opcode.SET_CONST, a=reg_of(atom, Bank.POST), const=0))
    for _ in range(opened):
        p = p.close_if()
    return p.with_halt()


def schema_to_pddl_text(schema: StripsSchema) -> str:
    """Render an operator in PDDL action syntax (deterministic atom order)."""
    if not schema.eff_pos and not schema.eff_neg:
        raise SchemaError("operator has no effects")
    pre = [a.text() for a in schema.pre_pos] + [f"(not {a.text()})" for a in schema.pre_neg]
    eff = [a.text() for a in schema.eff_pos] + [f"(not {a.text()})" for a in schema.eff_neg]
    return (
        f"(:action {schema.name}\n"
        f" :parameters ({' '.join(schema.parameters)})\n"
        f" :precondition (and {' '.join(pre)})\n"
        f" :effect (and {' '.join(eff)}))\n"
    )


def apply_schema(schema: StripsSchema, state: Sequence[int],
                 binding: dict[str, int], sig: ModelSignature) -> list[int] | None:
    """Standard operator application; ``None`` when preconditions fail."""

    def index(atom: Atom) -> int:
        objs = [binding[a] for a in atom.args]
        return ground_state_index(atom.pred, objs, sig)

    for atom in schema.pre_pos:
        if state[index(atom)] != 1:
            return None
    for atom in schema.pre_neg:
        if state[index(atom)] != 0:
            return None
    post = list(state)
    for atom in schema.eff_neg:
        post[index(atom)] = 0
    for atom in schema.eff_pos:
        post[index(atom)] = 1
    return post
