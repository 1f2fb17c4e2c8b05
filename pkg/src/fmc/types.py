"""Simple types for the FMC.

A type ``?r > !s`` is stored as two families of vectors indexed by location.
``inputs`` lists each slice in pop order (the order in which it is written),
``outputs`` in push order, so ``<x>.<y>.[y].[x] : t s > s t``.

The checker works forwards through the action sequence, keeping one symbolic
stack per location.  The only unknowns are the types of pushed arguments;
they become metavariables, and a variable of unknown type that is run
becomes an arrow whose slices are *segment* variables standing for unknown
sub-vectors.  Unifying vectors with segments is not unitary, so the checker
is a backtracking search with a step budget.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Union

from .machine import Halted, Memory, run
from .syntax import (
    MAIN, Lit, Pop, Prim, Push, Term, Thunk, Var, locations, print_loc,
)


# ---------------------------------------------------------------------------
# Public types


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arrow:
    inputs: tuple = ()   # ((loc, (t1, ..., tn)), ...) sorted by location, pop order
    outputs: tuple = ()  # same shape, push order

    def __str__(self):
        return print_type(self)

    def slice(self, loc: str) -> "Arrow":
        return arrow({loc: slice_of(self.inputs, loc)}, {loc: slice_of(self.outputs, loc)})


FmcType = Union[Base, Arrow]

Z = Base("Z")
B = Base("B")
EMPTY = Arrow()


def family(slices) -> tuple:
    """Normalize a mapping location -> vector into the sorted tuple form."""
    if isinstance(slices, tuple) and all(isinstance(p, tuple) and len(p) == 2 for p in slices):
        slices = dict(slices)
    if not isinstance(slices, dict):
        slices = {MAIN: tuple(slices)}
    return tuple(sorted((loc, tuple(v)) for loc, v in slices.items() if len(v)))


def arrow(inputs=(), outputs=()) -> Arrow:
    """Build a type; plain sequences are taken as main-location vectors."""
    return Arrow(family(inputs), family(outputs))


def slice_of(fam: tuple, loc: str) -> tuple:
    for l, v in fam:
        if l == loc:
            return v
    return ()


def singleton(loc: str, vec) -> tuple:
    return family({loc: tuple(vec)})


def type_eq(s: FmcType, t: FmcType) -> bool:
    return s == t


def type_locations(t: FmcType) -> set:
    if isinstance(t, Base):
        return set()
    out = {l for l, _ in t.inputs} | {l for l, _ in t.outputs}
    for _, v in t.inputs + t.outputs:
        for e in v:
            out |= type_locations(e)
    return out


def type_size(t: FmcType) -> int:
    if isinstance(t, Base):
        return 1
    return 1 + sum(type_size(e) for _, v in t.inputs + t.outputs for e in v)


def type_depth(t: FmcType) -> int:
    if isinstance(t, Base):
        return 0
    return 1 + max((type_depth(e) for _, v in t.inputs + t.outputs for e in v), default=0)


# stack orientation: vectors read bottom to top


def stack_inputs(t: Arrow) -> dict:
    return {l: tuple(reversed(v)) for l, v in t.inputs}


def from_stacks(ins: dict, outs: dict) -> Arrow:
    return arrow({l: tuple(reversed(v)) for l, v in ins.items()}, outs)


# ---------------------------------------------------------------------------
# Type algebra


def type_compose(s: Arrow, t: Arrow) -> Arrow | None:
    """Slice-wise composition; None where neither equation applies."""
    s_in, t_in = stack_inputs(s), stack_inputs(t)
    s_out, t_out = dict(s.outputs), dict(t.outputs)
    ins, outs = {}, {}
    for loc in set(s_in) | set(t_in) | set(s_out) | set(t_out):
        r, mid = s_in.get(loc, ()), s_out.get(loc, ())
        n, u = t_in.get(loc, ()), t_out.get(loc, ())
        if n[len(n) - len(mid):] == mid and len(n) >= len(mid):
            ins[loc], outs[loc] = n[:len(n) - len(mid)] + r, u
        elif mid[len(mid) - len(n):] == n:
            ins[loc], outs[loc] = r, mid[:len(mid) - len(n)] + u
        else:
            return None
    return from_stacks(ins, outs)


def expand(t: Arrow, extra) -> Arrow:
    """Add an untouched segment below both the inputs and the outputs."""
    extra = dict(family(extra))
    ins, outs = stack_inputs(t), dict(t.outputs)
    for loc, u in extra.items():
        ins[loc] = u + ins.get(loc, ())
        outs[loc] = u + outs.get(loc, ())
    return from_stacks(ins, outs)


# ---------------------------------------------------------------------------
# Printing and parsing


def _print_elem(t: FmcType) -> str:
    return t.name if isinstance(t, Base) else "(" + print_type(t) + ")"


def _print_family(fam: tuple, main_first: bool) -> list:
    parts = []
    main = slice_of(fam, MAIN)
    for loc, vec in fam:
        if loc != MAIN:
            parts.append(f"{loc}(" + " ".join(_print_elem(e) for e in vec) + ")")
    bare = [_print_elem(e) for e in main]
    return bare + parts if main_first else parts + bare


def print_type(t: FmcType) -> str:
    if isinstance(t, Base):
        return t.name
    left = " ".join(_print_family(t.inputs, True))
    right = " ".join(_print_family(t.outputs, False))
    return " ".join(p for p in (left, ">", right) if p)


class TypeSyntaxError(ValueError):
    pass


_TYPE_TOKEN = re.compile(r"\s*(?:(?P<slice>[A-Za-z~λ][A-Za-z0-9_']*\()|(?P<name>[A-Za-z][A-Za-z0-9_']*)|(?P<sym>[()>]))")


def parse_type(text: str) -> FmcType:
    """Parse ``a(s t) b(u) > c(v)``; ``o`` abbreviates the empty type ``(>)``."""
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TYPE_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise TypeSyntaxError(f"unexpected {text[pos:pos + 1]!r} at position {pos}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    tokens.append(("eof", "", len(text)))
    p = _TypeParser(tokens)
    if any(t[1] == ">" for t in tokens) and _top_level_arrow(tokens):
        result = p.arrow_type()
    else:
        result = p.elem()
    p.expect_eof()
    return result


def _top_level_arrow(tokens) -> bool:
    depth = 0
    for kind, val, _ in tokens:
        if val == "(" or kind == "slice":
            depth += 1
        elif val == ")":
            depth -= 1
        elif val == ">" and depth == 0:
            return True
    return False


class _TypeParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, val):
        tok = self.next()
        if tok[1] != val:
            raise TypeSyntaxError(f"expected {val!r} at position {tok[2]}")

    def expect_eof(self):
        if self.peek()[0] != "eof":
            raise TypeSyntaxError(f"unexpected {self.peek()[1]!r} at position {self.peek()[2]}")

    def arrow_type(self) -> Arrow:
        ins = self.side()
        self.expect(">")
        outs = self.side()
        return arrow(ins, outs)

    def side(self) -> dict:
        out: dict = {}
        while True:
            kind, val, pos = self.peek()
            if kind == "slice":
                self.next()
                loc = val[:-1]
                loc = MAIN if loc in ("~", "λ") else loc
                vec = []
                while self.peek()[1] != ")":
                    vec.append(self.elem())
                self.next()
                out[loc] = tuple(out.get(loc, ())) + tuple(vec)
            elif kind == "name" or val == "(":
                out[MAIN] = tuple(out.get(MAIN, ())) + (self.elem(),)
            else:
                return out

    def elem(self) -> FmcType:
        kind, val, pos = self.next()
        if kind == "name":
            return EMPTY if val == "o" else Base(val)
        if val == "(":
            if self.peek()[1] == ")":
                raise TypeSyntaxError(f"empty parentheses at position {pos}")
            t = self.arrow_type()
            self.expect(")")
            return t
        raise TypeSyntaxError(f"expected a type at position {pos}")


# ---------------------------------------------------------------------------
# Inhabitants and run sets


def bottom(t: FmcType, names: Iterable[str] | None = None) -> Term:
    """Canonical inhabitant: pop every input, push the bottom of every output.

    Inputs are popped location by location in name order.
    """
    if isinstance(t, Base):
        if t.name == "Z":
            return Term((Lit(0),))
        if t.name == "B":
            return Term((Lit(False),))
        raise ValueError(f"no canonical inhabitant for base type {t.name}")
    acts = []
    n = 0
    for loc, vec in t.inputs:
        for _ in vec:
            n += 1
            acts.append(Pop(loc, f"x{n}"))
    for loc, vec in t.outputs:
        for e in vec:
            acts.append(Push(bottom(e), loc))
    return Term(tuple(acts))


def bottom_memory(t: Arrow) -> Memory:
    return Memory({loc: tuple(bottom(e) for e in vec) for loc, vec in stack_inputs(t).items()})


def run_set_member(term: Term, t: FmcType, fuel: int = 100_000, depth: int = 2) -> bool:
    """Finite approximation of membership in the run set of ``t``.

    The term is run on stacks filled with bottom inhabitants of its input
    types; the run must halt in ``*`` with exactly the output vectors'
    lengths on every stack, and (to ``depth`` levels) each output must again
    belong to the run set of its type.
    """
    if isinstance(t, Base):
        if t.name == "Z":
            return term.actions and len(term.actions) == 1 and type(getattr(term.actions[0], "value", None)) is int
        if t.name == "B":
            return len(term.actions) == 1 and isinstance(getattr(term.actions[0], "value", None), bool)
        return False
    if term.fv:
        return False
    trace = run(bottom_memory(t), term, fuel, record=False)
    if not isinstance(trace.outcome, Halted) or trace.outcome.term.actions:
        return False
    mem = trace.outcome.memory
    outs = dict(t.outputs)
    for loc in set(mem.stacks) | set(outs):
        items, vec = mem.stack(loc), outs.get(loc, ())
        if len(items) != len(vec):
            return False
        if depth > 0:
            for item, ty in zip(items, vec):
                if isinstance(item, Thunk) or not run_set_member(item, ty, fuel, depth - 1):
                    return False
    return True


# ---------------------------------------------------------------------------
# Checker internals


@dataclass(frozen=True)
class _Meta:
    id: int


@dataclass(frozen=True)
class _Seg:
    id: int


@dataclass(frozen=True)
class _Arrow:
    ins: tuple   # ((loc, vec), ...) stack orientation, vec may hold _Seg
    outs: tuple


class TypeCheckFailure(Exception):
    pass


class SearchBudgetExceeded(TypeCheckFailure):
    """The bounded search stopped before deciding."""


class UnboundVariable(TypeCheckFailure):
    pass


class _Search:
    def __init__(self, locs, budget):
        self.locs = sorted(locs)
        self.budget = budget
        self.counter = itertools.count()
        self.ops = 0
        self.max_vec = 24
        self.pruned = False

    def tick(self):
        self.ops += 1
        if self.ops > self.budget:
            raise SearchBudgetExceeded(f"type search gave up after {self.budget} steps")

    def meta(self):
        return _Meta(next(self.counter))

    def seg(self):
        return _Seg(next(self.counter))

    def generic_arrow(self):
        return _Arrow(tuple((l, (self.seg(),)) for l in self.locs),
                      tuple((l, (self.seg(),)) for l in self.locs))

    # --- substitution --------------------------------------------------

    @staticmethod
    def walk(t, S):
        while isinstance(t, _Meta) and t.id in S:
            t = S[t.id]
        return t

    def vec(self, v, S) -> tuple:
        out = []
        for e in v:
            if isinstance(e, _Seg):
                if e.id in S:
                    out.extend(self.vec(S[e.id], S))
                else:
                    out.append(e)
            else:
                out.append(self.walk(e, S))
        return tuple(out)

    def occurs(self, ident, t, S) -> bool:
        if isinstance(t, _Seg):
            return t.id == ident or (t.id in S and any(self.occurs(ident, e, S) for e in S[t.id]))
        t = self.walk(t, S)
        if isinstance(t, _Meta):
            return t.id == ident
        if isinstance(t, _Arrow):
            return any(self.occurs(ident, e, S) for _, v in t.ins + t.outs for e in v)
        return False

    def resolve(self, t, S):
        """Fully substitute, grounding leftover unknowns to the empty type/vector."""
        t = self.walk(t, S)
        if isinstance(t, _Meta):
            return EMPTY
        if isinstance(t, Base):
            return t
        ins = {l: tuple(self.resolve(e, S) for e in self.vec(v, S) if not isinstance(e, _Seg)) for l, v in t.ins}
        outs = {l: tuple(self.resolve(e, S) for e in self.vec(v, S) if not isinstance(e, _Seg)) for l, v in t.outs}
        return from_stacks(ins, outs)

    # --- unification ---------------------------------------------------

    def unify(self, a, b, S):
        self.tick()
        a, b = self.walk(a, S), self.walk(b, S)
        if a == b:
            yield S
            return
        if isinstance(a, _Meta) or isinstance(b, _Meta):
            if not isinstance(a, _Meta):
                a, b = b, a
            if not self.occurs(a.id, b, S):
                yield {**S, a.id: b}
            return
        if isinstance(a, Base) or isinstance(b, Base):
            return
        a_in, a_out, b_in, b_out = dict(a.ins), dict(a.outs), dict(b.ins), dict(b.outs)
        pairs = []
        for loc in sorted(set(a_in) | set(b_in)):
            pairs.append((a_in.get(loc, ()), b_in.get(loc, ())))
        for loc in sorted(set(a_out) | set(b_out)):
            pairs.append((a_out.get(loc, ()), b_out.get(loc, ())))
        yield from self.unify_all(pairs, S)

    def unify_all(self, pairs, S):
        if not pairs:
            yield S
            return
        (u, v), rest = pairs[0], pairs[1:]
        for S1 in self.unify_vec(u, v, S):
            yield from self.unify_all(rest, S1)

    def bind_seg(self, seg, vec, S):
        if any(self.occurs(seg.id, e, S) for e in vec):
            return None
        return {**S, seg.id: tuple(vec)}

    def unify_vec(self, u, v, S, depth=0):
        self.tick()
        u, v = self.vec(u, S), self.vec(v, S)
        if depth > self.max_vec:
            # equations such as A x = x B have unboundedly many solutions
            self.pruned = True
            return
        if not u and not v:
            yield S
            return
        if not u or not v:
            rest = u or v
            if all(isinstance(e, _Seg) for e in rest):
                S1 = dict(S)
                for e in rest:
                    S1[e.id] = ()
                yield S1
            return
        x, y = u[-1], v[-1]
        if not isinstance(x, _Seg) and not isinstance(y, _Seg):
            for S1 in self.unify(x, y, S):
                yield from self.unify_vec(u[:-1], v[:-1], S1, depth + 1)
            return
        if x == y:
            yield from self.unify_vec(u[:-1], v[:-1], S, depth + 1)
            return
        if not isinstance(x, _Seg):
            u, v, x, y = v, u, y, x
        # x is a segment at the top of u
        if len(u) == 1:
            S1 = self.bind_seg(x, v, S)
            if S1 is not None:
                yield S1
            return
        if isinstance(y, _Seg) and len(v) == 1:
            S1 = self.bind_seg(y, u, S)
            if S1 is not None:
                yield S1
            return
        if isinstance(y, _Seg):
            # one of the two segments ends the other
            s1 = self.seg()
            S1 = self.bind_seg(x, (s1, y), S)
            if S1 is not None:
                yield from self.unify_vec(u[:-1] + (s1,), v[:-1], S1, depth + 1)
            s2 = self.seg()
            S2 = self.bind_seg(y, (s2, x), S)
            if S2 is not None:
                yield from self.unify_vec(u[:-1], v[:-1] + (s2,), S2, depth + 1)
            return
        yield from self.unify_vec(u[:-1], v, {**S, x.id: ()}, depth + 1)
        s1 = self.seg()
        S1 = self.bind_seg(x, (s1, y), S)
        if S1 is not None:
            yield from self.unify_vec(u[:-1] + (s1,), v[:-1], S1, depth + 1)

    def pop_last(self, v, S):
        """Split a vector into (rest, top) in every possible way."""
        self.tick()
        v = self.vec(v, S)
        if not v:
            return
        last = v[-1]
        if not isinstance(last, _Seg):
            yield v[:-1], last, S
            return
        s1, m = self.seg(), self.meta()
        yield v[:-1] + (s1,), m, {**S, last.id: (s1, m)}
        yield from self.pop_last(v[:-1], {**S, last.id: ()})

    # --- terms ---------------------------------------------------------

    def check_seq(self, acts, k, stacks, ctx, outs, S):
        """Yield (substitution, derivation node) for the suffix from ``k``."""
        self.tick()
        if k == len(acts):
            locs = sorted(set(stacks) | set(outs))
            pairs = [(stacks.get(l, ()), outs.get(l, ())) for l in locs]
            for S1 in self.unify_all(pairs, S):
                yield S1, ("T*", acts[k:], stacks, outs, ())
            return
        act = acts[k]
        if isinstance(act, Pop):
            for rest, top, S1 in self.pop_last(stacks.get(act.loc, ()), S):
                st = {**stacks, act.loc: rest}
                c = ctx if act.name == "_" else {**ctx, act.name: top}
                for S2, node in self.check_seq(acts, k + 1, st, c, outs, S1):
                    yield S2, ("Tλ", acts[k:], stacks, outs, (node,))
        elif isinstance(act, Push):
            m = self.meta()
            st = {**stacks, act.loc: stacks.get(act.loc, ()) + (m,)}
            for S1, node in self.check_seq(acts, k + 1, st, ctx, outs, S):
                for S2, arg_node in self.check_arg(act.arg, m, ctx, S1):
                    yield S2, ("Ta", acts[k:], stacks, outs, (arg_node, node))
        elif isinstance(act, Var):
            if act.name not in ctx:
                raise UnboundVariable(f"unbound variable {act.name}")
            t = self.walk(ctx[act.name], S)
            if isinstance(t, Base):
                return
            if isinstance(t, _Meta):
                arr = self.generic_arrow()
                S = {**S, t.id: arr}
                t = arr
            yield from self.apply_var(acts, k, t, stacks, ctx, outs, S)
        elif isinstance(act, Prim):
            yield from self.apply_prim(acts, k, act.name, stacks, ctx, outs, S)
        else:
            raise TypeCheckFailure(f"no typing rule for {type(act).__name__.lower()} actions")

    def apply_var(self, acts, k, t, stacks, ctx, outs, S):
        ins, outs_x = dict(t.ins), dict(t.outs)
        locs = sorted(set(ins) | set(outs_x))

        def go(i, st, S):
            if i == len(locs):
                yield st, S
                return
            loc = locs[i]
            r, s = ins.get(loc, ()), outs_x.get(loc, ())
            if not r:
                yield from go(i + 1, {**st, loc: st.get(loc, ()) + s}, S)
                return
            below = self.seg()
            for S1 in self.unify_vec(st.get(loc, ()), (below,) + r, S):
                yield from go(i + 1, {**st, loc: (below,) + s}, S1)

        for st, S1 in go(0, dict(stacks), S):
            for S2, node in self.check_seq(acts, k + 1, st, ctx, outs, S1):
                yield S2, ("Tx", acts[k:], stacks, outs, (node,))

    def apply_prim(self, acts, k, op, stacks, ctx, outs, S):
        if op == "if":
            sig_in, sig_out = [B, "t", "t"], ["t"]
        else:
            sig_in, sig_out = [Z, Z], [Z]
        var = self.meta()

        def go(i, st, S):
            if i == len(sig_in):
                yield st, S
                return
            want = var if sig_in[i] == "t" else sig_in[i]
            for rest, top, S1 in self.pop_last(st, S):
                for S2 in self.unify(top, want, S1):
                    yield from go(i + 1, rest, S2)

        for st, S1 in go(0, stacks.get(MAIN, ()), S):
            pushed = tuple(var if e == "t" else e for e in sig_out)
            new = {**stacks, MAIN: st + pushed}
            for S2, node in self.check_seq(acts, k + 1, new, ctx, outs, S1):
                yield S2, ("Tc", acts[k:], stacks, outs, (node,))

    def check_arg(self, arg, m, ctx, S):
        if isinstance(arg, Thunk):
            raise TypeCheckFailure("thunks have no typing rule")
        acts = arg.actions
        if len(acts) == 1 and isinstance(acts[0], Lit):
            base = B if isinstance(acts[0].value, bool) else Z
            for S1 in self.unify(m, base, S):
                yield S1, ("Tc", acts, {}, {}, ())
            return
        if len(acts) == 1 and isinstance(acts[0], Var) and acts[0].name in ctx:
            xt = self.walk(ctx[acts[0].name], S)
            if isinstance(xt, (Base, _Meta)):
                for S1 in self.unify(m, xt, S):
                    yield S1, ("Tx", acts, {}, {}, (m,))
                if isinstance(xt, Base):
                    return
        t = self.walk(m, S)
        if isinstance(t, Base):
            return
        if isinstance(t, _Meta):
            arr = self.generic_arrow()
            S = {**S, t.id: arr}
            t = arr
        for S1, node in self.check_seq(acts, 0, dict(t.ins), ctx, dict(t.outs), S):
            yield S1, node


# ---------------------------------------------------------------------------
# Public checking API


@dataclass
class Derivation:
    rule: str
    term: Term
    type: FmcType
    premises: tuple = ()

    def __str__(self):
        return "\n".join(self.lines())

    def lines(self, indent: int = 0) -> list:
        out = [" " * indent + f"{self.rule}: {self.term} : {print_type(self.type)}"]
        for p in self.premises:
            out.extend(p.lines(indent + 2))
        return out


def _to_internal(t: FmcType):
    if isinstance(t, Base):
        return t
    ins = tuple((l, tuple(_to_internal(e) for e in v)) for l, v in stack_inputs(t).items())
    outs = tuple((l, tuple(_to_internal(e) for e in v)) for l, v in t.outputs)
    return _Arrow(ins, outs)


def _build(search: _Search, node, S) -> Derivation:
    rule, acts, stacks, outs, children = node
    term = Term(tuple(acts))
    if rule in ("Tx", "Tc") and not stacks and not outs and children and isinstance(children[0], _Meta):
        return Derivation(rule, term, search.resolve(children[0], S))
    ty = search.resolve(_Arrow(tuple(stacks.items()), tuple(outs.items())), S)
    return Derivation(rule, term, ty, tuple(_build(search, c, S) for c in children if isinstance(c, tuple)))


def _relevant_locations(term: Term, types: Iterable[FmcType]) -> set:
    locs = locations(term) | {MAIN}
    for t in types:
        locs |= type_locations(t)
    return locs


def check(ctx: dict | None, term: Term, goal: FmcType, budget: int = 200_000) -> Derivation:
    """Derivation of ``ctx |- term : goal``; raises TypeCheckFailure otherwise."""
    ctx = dict(ctx or {})
    missing = term.fv - set(ctx)
    if missing:
        raise UnboundVariable(f"unbound variable(s): {', '.join(sorted(missing))}")
    if isinstance(goal, Base):
        raise TypeCheckFailure(f"a term cannot have base type {goal}")
    search = _Search(_relevant_locations(term, [goal, *ctx.values()]), budget)
    ictx = {x: _to_internal(t) for x, t in ctx.items()}
    ig = _to_internal(goal)
    for S, node in search.check_seq(term.actions, 0, dict(ig.ins), ictx, dict(ig.outs), {}):
        return _build(search, node, S)
    if search.pruned:
        raise SearchBudgetExceeded("type search was cut off; the result is inconclusive")
    raise TypeCheckFailure(f"{term} does not have type {print_type(goal)}")


def has_type(ctx: dict | None, term: Term, goal: FmcType, budget: int = 200_000) -> bool:
    """Decided membership; SearchBudgetExceeded propagates when undecided."""
    try:
        check(ctx, term, goal, budget)
        return True
    except SearchBudgetExceeded:
        raise
    except TypeCheckFailure:
        return False


def solve_type(term: Term, ctx: dict | None = None, budget: int = 200_000) -> Arrow | None:
    """Some type for ``term`` found by bounded search, or None.

    This is not principal-type inference: the search returns the first
    solution it meets.  Raises SearchBudgetExceeded when it cannot decide.
    """
    ctx = dict(ctx or {})
    if term.fv - set(ctx):
        return None
    search = _Search(_relevant_locations(term, ctx.values()), budget)
    ins = {l: (search.seg(),) for l in search.locs}
    outs = {l: (search.seg(),) for l in search.locs}
    ictx = {x: _to_internal(t) for x, t in ctx.items()}
    try:
        for S, _ in search.check_seq(term.actions, 0, ins, ictx, outs, {}):
            return search.resolve(_Arrow(tuple(ins.items()), tuple(outs.items())), S)
    except SearchBudgetExceeded:
        raise
    except TypeCheckFailure:
        return None
    if search.pruned:
        raise SearchBudgetExceeded("type search was cut off; the result is inconclusive")
    return None


# ---------------------------------------------------------------------------
# Embedding of the location-indexed poly-types


@dataclass(frozen=True)
class PolyArrow:
    """``a(s) => t`` between poly-types; the base type is ``o``."""

    loc: str
    arg: object
    result: object


def embed_poly(t) -> Arrow:
    """``o`` becomes ``(>)`` and ``a(s) => t`` prepends ``s`` to t's a-inputs."""
    if t == "o":
        return EMPTY
    inner = embed_poly(t.result)
    ins = {l: v for l, v in inner.inputs}
    ins[t.loc] = (embed_poly(t.arg),) + ins.get(t.loc, ())
    return arrow(ins, {})
