"""Multi-stack abstract machine.

Memory maps locations to stacks (bottom first, top at the right).  Input-like
locations can carry a supplier that is consulted when a pop finds the stack
empty.  States are immutable; ``step`` returns a fresh state.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Iterable, Union

from .syntax import (
    MAIN, NIL, Force, Lit, Pop, Prim, Push, Term, Thunk, Value, Var,
    alpha_key, compose, parse, print_loc, print_value, substitute,
)

CHURCH_TRUE = parse("<x>.<y>.x")
CHURCH_FALSE = parse("<x>.<y>.y")

# column order of trace summaries; other cells go between these and main
LEADING_LOCATIONS = ("out", "in", "rnd", "nd")


# ---------------------------------------------------------------------------
# Stream suppliers


@dataclass(frozen=True)
class FixedList:
    """Finite stream; items are handed out left to right."""

    items: tuple = ()
    consumed: int = 0

    def draw(self):
        if self.consumed >= len(self.items):
            return None
        return self.items[self.consumed], replace(self, consumed=self.consumed + 1)


@dataclass(frozen=True)
class SeededRandom:
    """Reproducible random stream of Church booleans or integer literals."""

    seed: int = 42
    kind: str = "bool"
    low: int = 0
    high: int = 9
    drawn: int = 0

    def draw(self):
        rng = random.Random(f"{self.seed}:{self.drawn}")
        if self.kind == "int":
            item = Term((Lit(rng.randint(self.low, self.high)),))
        else:
            item = CHURCH_TRUE if rng.random() < 0.5 else CHURCH_FALSE
        return item, replace(self, drawn=self.drawn + 1)


@dataclass(frozen=True)
class NondetChooser:
    """Resolves nondeterministic choice.

    ``leftmost`` always answers the Church boolean that selects the left
    summand of ``N + M`` under the call-by-name encoding (false); ``seeded``
    behaves like a seeded coin.
    """

    policy: str = "leftmost"
    seed: int = 42
    drawn: int = 0

    def draw(self):
        if self.policy == "leftmost":
            return CHURCH_FALSE, self
        item, _ = SeededRandom(self.seed, "bool", drawn=self.drawn).draw()
        return item, replace(self, drawn=self.drawn + 1)


Supplier = Union[FixedList, SeededRandom, NondetChooser]


# ---------------------------------------------------------------------------
# Memory and states


@dataclass(frozen=True, eq=False)
class Memory:
    stacks: dict = field(default_factory=dict)
    suppliers: dict = field(default_factory=dict)

    def stack(self, loc: str) -> tuple:
        return self.stacks.get(loc, ())

    def push(self, loc: str, value: Value) -> "Memory":
        stacks = dict(self.stacks)
        stacks[loc] = self.stack(loc) + (value,)
        return Memory(stacks, self.suppliers)

    def pop(self, loc: str):
        """Return ``(value, memory)`` or None when nothing can be popped."""
        st = self.stack(loc)
        if st:
            stacks = dict(self.stacks)
            stacks[loc] = st[:-1]
            return st[-1], Memory(stacks, self.suppliers)
        supplier = self.suppliers.get(loc)
        if supplier is None:
            return None
        drawn = supplier.draw()
        if drawn is None:
            return None
        value, nxt = drawn
        suppliers = dict(self.suppliers)
        suppliers[loc] = nxt
        return value, Memory(self.stacks, suppliers)

    def key(self):
        """Stacks up to alpha-equivalence, ignoring empty stacks and suppliers."""
        return tuple(sorted(
            (loc, tuple(alpha_key(v) for v in st)) for loc, st in self.stacks.items() if st
        ))

    def same_stacks(self, other: "Memory") -> bool:
        return self.key() == other.key()

    def locations(self) -> list:
        return order_locations(set(self.stacks) | set(self.suppliers))

    def __eq__(self, other):
        return isinstance(other, Memory) and self.same_stacks(other)

    def __repr__(self):
        return f"Memory({format_memory(self)})"


def memory(stacks: dict | None = None, suppliers: dict | None = None, features=()) -> Memory:
    """Build a memory; stack entries may be terms or concrete-syntax strings."""
    out = {}
    for loc, items in (stacks or {}).items():
        loc = MAIN if loc in ("", "~", "λ") else loc
        out[loc] = tuple(parse(i, features) if isinstance(i, str) else i for i in items)
    return Memory(out, dict(suppliers or {}))


def order_locations(locs) -> list:
    locs = set(locs)
    lead = [l for l in LEADING_LOCATIONS if l in locs]
    cells = sorted(l for l in locs if l not in LEADING_LOCATIONS and l != MAIN)
    return lead + cells + ([MAIN] if MAIN in locs else [])


def format_stack(items) -> str:
    return "·".join(["ε"] + [print_value(v) for v in items])


def format_memory(mem: Memory, locs: Iterable[str] | None = None) -> str:
    locs = order_locations(locs) if locs is not None else mem.locations()
    return " ".join(f"{loc}={format_stack(mem.stack(loc))}" for loc in locs)


@dataclass(frozen=True)
class State:
    memory: Memory
    term: Term


# ---------------------------------------------------------------------------
# Transitions


@dataclass(frozen=True)
class Transition:
    kind: str  # push | pop | force | prim
    loc: str
    state: State

    @property
    def label(self) -> str:
        if self.kind in ("push", "pop"):
            return f"{print_loc(self.loc) or 'λ'}<{self.kind}>"
        return self.kind


@dataclass(frozen=True)
class Halted:
    memory: Memory
    term: Term = NIL  # a literal when the run returns a constant


@dataclass(frozen=True)
class Stuck:
    reason: str  # open-variable | empty-stack | type-mismatch
    state: State
    detail: str = ""


@dataclass(frozen=True)
class FuelExhausted:
    state: State


def _literal(value) -> int | bool | None:
    if isinstance(value, Term) and len(value.actions) == 1 and isinstance(value.actions[0], Lit):
        return value.actions[0].value
    return None


def _prim_step(state: State, op: str, rest: Term):
    mem = state.memory
    arity = 3 if op == "if" else 2
    args = []
    for _ in range(arity):
        got = mem.pop(MAIN)
        if got is None:
            return Stuck("empty-stack", state, f"{op} needs {arity} operands")
        value, mem = got
        args.append(value)
    if op == "if":
        cond = _literal(args[0])
        if not isinstance(cond, bool):
            return Stuck("type-mismatch", state, "if expects a boolean on top")
        result = args[1] if cond else args[2]
    else:
        x, y = _literal(args[0]), _literal(args[1])
        if type(x) is not int or type(y) is not int:
            return Stuck("type-mismatch", state, f"{op} expects two integers")
        # the top of the stack is the first operand
        n = {"+": x + y, "-": x - y, "mul": x * y}[op]
        result = Term((Lit(n),))
    return Transition("prim", MAIN, State(mem.push(MAIN, result), rest))


def step(state: State):
    """One machine transition, or Halted / Stuck."""
    term = state.term
    if not term.actions:
        return Halted(state.memory)
    head, rest = term.actions[0], Term(term.actions[1:])
    if isinstance(head, Push):
        return Transition("push", head.loc, State(state.memory.push(head.loc, head.arg), rest))
    if isinstance(head, Pop):
        got = state.memory.pop(head.loc)
        if got is None:
            return Stuck("empty-stack", state, f"nothing to pop at {print_loc(head.loc) or 'λ'}")
        value, mem = got
        return Transition("pop", head.loc, State(mem, substitute(value, head.name, rest)))
    if isinstance(head, Var):
        return Stuck("open-variable", state, head.name)
    if isinstance(head, Force):
        if isinstance(head.value, Thunk):
            return Transition("force", MAIN, State(state.memory, compose(head.value.body, rest)))
        return Stuck("open-variable", state, head.value)
    if isinstance(head, Lit):
        return Halted(state.memory, term)
    return _prim_step(state, head.name, rest)


@dataclass
class Trace:
    initial: State
    steps: list
    outcome: object
    length: int = 0

    @property
    def final(self) -> State:
        out = self.outcome
        if isinstance(out, Halted):
            return State(out.memory, out.term)
        return out.state

    @property
    def halted(self) -> bool:
        return isinstance(self.outcome, Halted)

    def states(self) -> list:
        return [self.initial] + [s.state for s in self.steps]

    def triples(self):
        """(state-before, transition label, state-after) for each step."""
        before = self.initial
        for s in self.steps:
            yield before, s.label, s.state
            before = s.state

    def format(self, locs: Iterable[str] | None = None) -> str:
        if locs is None:
            seen = set(self.initial.memory.locations())
            for s in self.steps:
                seen.add(s.loc)
                seen |= set(s.state.memory.locations())
            locs = seen
        width = max([7] + [len(s.label) for s in self.steps])
        lines = [f"{'':{width}} | {format_memory(self.initial.memory, locs)} | {self.initial.term}"]
        for s in self.steps:
            lines.append(f"{s.label:{width}} | {format_memory(s.state.memory, locs)} | {s.state.term}")
        return "\n".join(lines)


def run(mem: Memory | None, term: Term, fuel: int = 100_000, record: bool = True) -> Trace:
    """Iterate ``step`` until the machine halts, gets stuck or runs out of fuel."""
    if fuel < 0:
        raise ValueError("fuel must be non-negative")
    state = State(mem if mem is not None else Memory(), term)
    initial = state
    steps: list = []
    count = 0
    while True:
        result = step(state)
        if not isinstance(result, Transition):
            return Trace(initial, steps, result, count)
        if count >= fuel:
            return Trace(initial, steps, FuelExhausted(state), count)
        count += 1
        state = result.state
        if record:
            steps.append(result)


def run_composed_check(R: Memory, M: Term, N: Term, fuel: int = 100_000) -> bool:
    """Whether runs of M then N compose into a run of ``M;N`` with the same result."""
    first = run(R, M, fuel, record=False)
    if not (first.halted and not first.outcome.term.actions):
        raise ValueError("the run of the first term does not halt in *")
    second = run(first.outcome.memory, N, fuel, record=False)
    if not (second.halted and not second.outcome.term.actions):
        raise ValueError("the run of the second term does not halt in *")
    whole = run(R, compose(M, N), fuel, record=False)
    return (
        whole.halted
        and not whole.outcome.term.actions
        and whole.outcome.memory.same_stacks(second.outcome.memory)
    )
