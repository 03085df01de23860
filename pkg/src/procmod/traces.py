"""Transition traces: data model, file format and built-in generators.

Trace files are JSON Lines.  The first line is a header object carrying the
format version and the signature (object count, state-variable families
with domains, target language, latent-register defaults); every following
line is one ``{label, args, pre, post}`` record with states as flat integer
arrays in grounding order.  Files are written canonically so reloading and
re-saving is byte-identical.

Generators cover one-dimensional cellular automata, pancake sorting and
Tower of Hanoi (the CLI surface), plus blocksworld and gripper as library
domains.  Randomness comes from a small linear congruential generator with
documented constants, so a (parameters, seed) pair reproduces the same
bytes on any implementation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .language import Atom, StripsSchema, apply_schema, ca_rule_table, ca_signature
from .machine import DimensionError, ModelSignature, StateVar

__all__ = [
    "Example",
    "ExampleSet",
    "TraceFormatError",
    "Lcg",
    "load_traces",
    "save_traces",
    "partition_by_label",
    "ca_step",
    "gen_ca_traces",
    "flip_prefix",
    "gen_pancake_traces",
    "StripsDomain",
    "hanoi_domain",
    "gen_hanoi_traces",
    "blocks_domain",
    "gen_blocks_traces",
    "gripper_domain",
    "gen_gripper_traces",
]


class TraceFormatError(Exception):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Example:
    """One observed transition: pre-state, labelled action, post-state."""

    pre: tuple[int, ...]
    label: str
    args: tuple[int, ...]
    post: tuple[int, ...]


@dataclass
class ExampleSet:
    signature: ModelSignature
    examples: tuple[Example, ...]
    partition: dict[str, tuple[Example, ...]] = field(init=False)

    def __post_init__(self) -> None:
        part: dict[str, list[Example]] = {}
        for e in self.examples:
            if len(e.pre) != self.signature.state_size or len(e.post) != self.signature.state_size:
                raise DimensionError(
                    f"example for {e.label!r} has {len(e.pre)}/{len(e.post)} variables, "
                    f"signature has {self.signature.state_size}")
            part.setdefault(e.label, []).append(e)
        self.partition = {k: tuple(v) for k, v in part.items()}

    def __len__(self) -> int:
        return len(self.examples)

    def for_label(self, label: str) -> "ExampleSet":
        return ExampleSet(self.signature, self.partition[label])

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.partition)


def partition_by_label(es: ExampleSet) -> dict[str, ExampleSet]:
    """Split an example set by transition label (stable first-seen order)."""
    return {label: es.for_label(label) for label in es.partition}


# ---------------------------------------------------------------------------
# File format

FORMAT_VERSION = 1


def _signature_json(sig: ModelSignature) -> dict:
    d = {
        "objects": sig.num_objects,
        "state_vars": [
            {"name": v.name, "arity": v.arity, "domain": list(v.domain)}
            for v in sig.state_vars
        ],
        "language": sig.language,
        "latent": sig.num_latent,
    }
    if sig.latent_overrides:
        d["latent_overrides"] = dict(sig.latent_overrides)
    return d


def _signature_from_json(d: dict) -> ModelSignature:
    return ModelSignature(
        num_objects=d["objects"],
        state_vars=tuple(
            StateVar(v["name"], v["arity"], tuple(v["domain"])) for v in d["state_vars"]
        ),
        num_latent=d["latent"],
        language=d.get("language", "ram"),
        latent_overrides=d.get("latent_overrides", {}),
    )


def save_traces(es: ExampleSet, path: str | Path) -> None:
    lines = [json.dumps(
        {"format_version": FORMAT_VERSION, "signature": _signature_json(es.signature)},
        separators=(",", ":"))]
    for e in es.examples:
        lines.append(json.dumps(
            {"label": e.label, "args": list(e.args), "pre": list(e.pre), "post": list(e.post)},
            separators=(",", ":")))
    Path(path).write_text("\n".join(lines) + "\n")


def load_traces(path: str | Path) -> ExampleSet:
    raw = Path(path).read_text().splitlines()
    rows = [(i + 1, s) for i, s in enumerate(raw) if s.strip()]
    if not rows:
        raise TraceFormatError(1, "empty trace file")
    no, header_text = rows[0]
    try:
        header = json.loads(header_text)
    except json.JSONDecodeError as e:
        raise TraceFormatError(no, f"bad header: {e}") from e
    if header.get("format_version") != FORMAT_VERSION:
        raise TraceFormatError(no, "missing or unsupported format_version")
    try:
        sig = _signature_from_json(header["signature"])
    except (KeyError, TypeError) as e:
        raise TraceFormatError(no, f"bad signature: {e}") from e
    examples = []
    for no, text in rows[1:]:
        try:
            rec = json.loads(text)
            ex = Example(pre=tuple(rec["pre"]), label=rec["label"],
                         args=tuple(rec["args"]), post=tuple(rec["post"]))
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise TraceFormatError(no, f"bad record: {e}") from e
        if len(ex.pre) != sig.state_size or len(ex.post) != sig.state_size:
            raise TraceFormatError(
                no, f"state has {len(ex.pre)}/{len(ex.post)} variables, "
                    f"signature has {sig.state_size}")
        if any(not 0 <= a < sig.num_objects for a in ex.args):
            raise TraceFormatError(no, "action argument out of object range")
        examples.append(ex)
    if not examples:
        raise TraceFormatError(no, "no examples")
    return ExampleSet(sig, tuple(examples))


# ---------------------------------------------------------------------------
# Deterministic randomness

class Lcg:
    """64-bit linear congruential generator, stable across implementations.

    ``x_{k+1} = (a * x_k + c) mod 2**64`` with a = 6364136223846793005 and
    c = 1442695040888963407 (Knuth's MMIX constants).  The state is seeded
    directly with the seed and stepped twice to decorrelate small seeds;
    draws use the upper 32 bits, bounded draws take them modulo n.
    """

    A = 6364136223846793005
    C = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK
        self.next_u64()
        self.next_u64()

    def next_u64(self) -> int:
        self.state = (self.A * self.state + self.C) & self.MASK
        return self.state

    def next_u32(self) -> int:
        return self.next_u64() >> 32

    def randint(self, n: int) -> int:
        """Uniform draw from [0, n)."""
        if n <= 0:
            raise ValueError("empty range")
        return self.next_u32() % n

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]
        return items


# ---------------------------------------------------------------------------
# Cellular automata

def ca_step(tape: Sequence[int], table: Sequence[int]) -> tuple[int, ...]:
    """One synchronous update with zero-padded boundaries."""
    n = len(tape)
    out = []
    for i in range(n):
        left = tape[i - 1] if i > 0 else 0
        right = tape[i + 1] if i < n - 1 else 0
        out.append(table[left * 4 + tape[i] * 2 + right])
    return tuple(out)


def gen_ca_traces(rule: int, cells: int, steps: int,
                  init: Sequence[int] | None = None) -> ExampleSet:
    """Consecutive transitions of one automaton run.

    The default tape starts with ones in the three central cells.
    """
    if cells < 3:
        raise ValueError("automata need at least 3 cells")
    table = ca_rule_table(rule)
    if init is None:
        tape = [0] * cells
        mid = cells // 2
        for i in (mid - 1, mid, mid + 1):
            tape[i] = 1
        tape = tuple(tape)
    else:
        if len(init) != cells or any(v not in (0, 1) for v in init):
            raise ValueError("init tape must be 0/1 of the requested width")
        tape = tuple(init)
    sig = ca_signature(cells)
    examples = []
    for _ in range(steps):
        nxt = ca_step(tape, table)
        examples.append(Example(pre=tape, label="step", args=(), post=nxt))
        tape = nxt
    return ExampleSet(sig, tuple(examples))


# ---------------------------------------------------------------------------
# Pancake sorting

def flip_prefix(state: Sequence[int], k: int) -> tuple[int, ...]:
    """Reverse stack positions 0..k (k names the deepest flipped pancake)."""
    s = list(state)
    return tuple(s[k::-1] + s[k + 1:])


def pancake_signature(num: int) -> ModelSignature:
    return ModelSignature(
        num_objects=num,
        state_vars=(StateVar("size_at", 1, (0, num)),),
        num_latent=2,
        language="ram",
    )


def gen_pancake_traces(num_pancakes: int, count: int, seed: int) -> ExampleSet:
    """Random flips of one shuffled stack; flip depths are drawn uniformly
    from [0, num_pancakes - 1)."""
    if num_pancakes < 2:
        raise ValueError("need at least two pancakes")
    rng = Lcg(seed)
    state = tuple(rng.shuffle(list(range(1, num_pancakes + 1))))
    examples = []
    for _ in range(count):
        k = rng.randint(num_pancakes - 1)
        post = flip_prefix(state, k)
        examples.append(Example(pre=state, label="flip", args=(k,), post=post))
        state = post
    return ExampleSet(pancake_signature(num_pancakes), tuple(examples))


# ---------------------------------------------------------------------------
# STRIPS domains

@dataclass(frozen=True)
class StripsDomain:
    """A ground planning domain driving trace generation and oracles."""

    signature: ModelSignature
    object_names: tuple[str, ...]
    schemas: tuple[StripsSchema, ...]
    initial: tuple[int, ...]

    def applicable(self, state: Sequence[int]):
        """(schema, binding, post) triples in a fixed deterministic order."""
        n = self.signature.num_objects
        out = []
        for schema in self.schemas:
            k = len(schema.parameters)
            for flat in range(n ** k):
                objs, rest = [], flat
                for _ in range(k):
                    objs.append(rest % n)
                    rest //= n
                objs.reverse()
                binding = dict(zip(schema.parameters, objs))
                post = apply_schema(schema, state, binding, self.signature)
                if post is not None and tuple(post) != tuple(state):
                    out.append((schema, tuple(objs), tuple(post)))
        return out

    def random_walk(self, count: int, rng: Lcg,
                    state: tuple[int, ...] | None = None) -> ExampleSet:
        state = state if state is not None else self.initial
        examples = []
        for _ in range(count):
            apps = self.applicable(state)
            if not apps:
                break
            schema, args, post = apps[rng.randint(len(apps))]
            examples.append(Example(pre=state, label=schema.name, args=args, post=post))
            state = post
        return ExampleSet(self.signature, tuple(examples))

    def enumerate_transitions(self):
        """All reachable states and transitions from the initial state."""
        seen = {self.initial}
        frontier = [self.initial]
        transitions = []
        while frontier:
            state = frontier.pop()
            for schema, args, post in self.applicable(state):
                transitions.append(Example(pre=state, label=schema.name, args=args, post=post))
                if post not in seen:
                    seen.add(post)
                    frontier.append(post)
        return sorted(seen), transitions


def _atoms(pred: str, *args: str) -> Atom:
    return Atom(pred, tuple(args))


def hanoi_domain(discs: int, pegs: int = 3) -> StripsDomain:
    """Tower of Hanoi over on/clear/smaller atoms.

    Objects are the discs (small to large) followed by the pegs;
    ``smaller(x, y)`` holds when y is smaller than x, so every disc is
    smaller than every peg.
    """
    if discs < 1:
        raise ValueError("need at least one disc")
    n = discs + pegs
    sig = ModelSignature(
        num_objects=n,
        state_vars=(StateVar("on", 2, (0, 1)), StateVar("clear", 1, (0, 1)),
                    StateVar("smaller", 2, (0, 1))),
        num_latent=0,
        language="strips",
    )
    names = tuple(f"d{i}" for i in range(discs)) + tuple(f"p{i}" for i in range(pegs))
    state = [0] * sig.state_size

    def set_atom(pred: str, objs: Sequence[int], v: int = 1) -> None:
        state[sig.ground_index(sig.family_index(pred), objs)] = v

    for p in range(pegs):
        for d in range(discs):
            set_atom("smaller", (discs + p, d))
    for big in range(discs):
        for small in range(big):
            set_atom("smaller", (big, small))
    for d in range(discs - 1):
        set_atom("on", (d, d + 1))
    set_atom("on", (discs - 1, discs))  # largest disc on the first peg
    set_atom("clear", (0,))
    for p in range(1, pegs):
        set_atom("clear", (discs + p,))
    move = StripsSchema(
        name="move",
        parameters=("?disc", "?from", "?to"),
        pre_pos=(_atoms("smaller", "?to", "?disc"), _atoms("on", "?disc", "?from"),
                 _atoms("clear", "?disc"), _atoms("clear", "?to")),
        pre_neg=(),
        eff_pos=(_atoms("clear", "?from"), _atoms("on", "?disc", "?to")),
        eff_neg=(_atoms("on", "?disc", "?from"), _atoms("clear", "?to")),
    )
    return StripsDomain(sig, names, (move,), tuple(state))


def gen_hanoi_traces(num_discs: int, count: int, seed: int) -> ExampleSet:
    return hanoi_domain(num_discs).random_walk(count, Lcg(seed))


def blocks_domain(num_blocks: int) -> StripsDomain:
    """Four-operator blocksworld starting with every block on the table."""
    if num_blocks < 2:
        raise ValueError("need at least two blocks")
    sig = ModelSignature(
        num_objects=num_blocks,
        state_vars=(StateVar("on", 2, (0, 1)), StateVar("ontable", 1, (0, 1)),
                    StateVar("clear", 1, (0, 1)), StateVar("holding", 1, (0, 1)),
                    StateVar("handempty", 0, (0, 1))),
        num_latent=0,
        language="strips",
    )
    state = [0] * sig.state_size
    for b in range(num_blocks):
        state[sig.ground_index(1, (b,))] = 1  # ontable
        state[sig.ground_index(2, (b,))] = 1  # clear
    state[sig.ground_index(4, ())] = 1  # handempty
    pick_up = StripsSchema(
        "pick-up", ("?x",),
        pre_pos=(_atoms("clear", "?x"), _atoms("ontable", "?x"), _atoms("handempty")),
        pre_neg=(),
        eff_pos=(_atoms("holding", "?x"),),
        eff_neg=(_atoms("ontable", "?x"), _atoms("clear", "?x"), _atoms("handempty")),
    )
    put_down = StripsSchema(
        "put-down", ("?x",),
        pre_pos=(_atoms("holding", "?x"),),
        pre_neg=(),
        eff_pos=(_atoms("clear", "?x"), _atoms("handempty"), _atoms("ontable", "?x")),
        eff_neg=(_atoms("holding", "?x"),),
    )
    stack = StripsSchema(
        "stack", ("?x", "?y"),
        pre_pos=(_atoms("holding", "?x"), _atoms("clear", "?y")),
        pre_neg=(),
        eff_pos=(_atoms("clear", "?x"), _atoms("handempty"), _atoms("on", "?x", "?y")),
        eff_neg=(_atoms("holding", "?x"), _atoms("clear", "?y")),
    )
    unstack = StripsSchema(
        "unstack", ("?x", "?y"),
        pre_pos=(_atoms("on", "?x", "?y"), _atoms("clear", "?x"), _atoms("handempty")),
        pre_neg=(),
        eff_pos=(_atoms("holding", "?x"), _atoms("clear", "?y")),
        eff_neg=(_atoms("clear", "?x"), _atoms("handempty"), _atoms("on", "?x", "?y")),
    )
    names = tuple(f"b{i}" for i in range(num_blocks))
    return StripsDomain(sig, names, (pick_up, put_down, stack, unstack), tuple(state))


def gen_blocks_traces(num_blocks: int, count: int, seed: int) -> ExampleSet:
    return blocks_domain(num_blocks).random_walk(count, Lcg(seed))


def gripper_domain(num_balls: int) -> StripsDomain:
    """Two rooms, two grippers, n balls; objects are rooms, grippers, balls."""
    if num_balls < 1:
        raise ValueError("need at least one ball")
    n = 4 + num_balls
    sig = ModelSignature(
        num_objects=n,
        state_vars=(StateVar("room", 1, (0, 1)), StateVar("gripper", 1, (0, 1)),
                    StateVar("ball", 1, (0, 1)), StateVar("at-robby", 1, (0, 1)),
                    StateVar("at", 2, (0, 1)), StateVar("free", 1, (0, 1)),
                    StateVar("carry", 2, (0, 1))),
        num_latent=0,
        language="strips",
    )
    state = [0] * sig.state_size

    def set_atom(pred: str, objs: Sequence[int]) -> None:
        state[sig.ground_index(sig.family_index(pred), objs)] = 1

    set_atom("room", (0,))
    set_atom("room", (1,))
    set_atom("gripper", (2,))
    set_atom("gripper", (3,))
    set_atom("free", (2,))
    set_atom("free", (3,))
    set_atom("at-robby", (0,))
    for b in range(4, n):
        set_atom("ball", (b,))
        set_atom("at", (b, 0))
    move = StripsSchema(
        "move", ("?from", "?to"),
        pre_pos=(_atoms("room", "?from"), _atoms("room", "?to"), _atoms("at-robby", "?from")),
        pre_neg=(),
        eff_pos=(_atoms("at-robby", "?to"),),
        eff_neg=(_atoms("at-robby", "?from"),),
    )
    pick = StripsSchema(
        "pick", ("?obj", "?room", "?gripper"),
        pre_pos=(_atoms("ball", "?obj"), _atoms("room", "?room"), _atoms("gripper", "?gripper"),
                 _atoms("at", "?obj", "?room"), _atoms("at-robby", "?room"),
                 _atoms("free", "?gripper")),
        pre_neg=(),
        eff_pos=(_atoms("carry", "?obj", "?gripper"),),
        eff_neg=(_atoms("at", "?obj", "?room"), _atoms("free", "?gripper")),
    )
    drop = StripsSchema(
        "drop", ("?obj", "?room", "?gripper"),
        pre_pos=(_atoms("ball", "?obj"), _atoms("room", "?room"), _atoms("gripper", "?gripper"),
                 _atoms("carry", "?obj", "?gripper"), _atoms("at-robby", "?room")),
        pre_neg=(),
        eff_pos=(_atoms("at", "?obj", "?room"), _atoms("free", "?gripper")),
        eff_neg=(_atoms("carry", "?obj", "?gripper"),),
    )
    names = ("ra", "rb", "g0", "g1") + tuple(f"ball{i}" for i in range(num_balls))
    return StripsDomain(sig, names, (move, pick, drop), tuple(state))


def gen_gripper_traces(num_balls: int, count: int, seed: int) -> ExampleSet:
    return gripper_domain(num_balls).random_walk(count, Lcg(seed))
