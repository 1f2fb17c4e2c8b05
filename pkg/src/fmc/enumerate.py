"""Exhaustive and random generators for terms, types and source programs.

Enumerations name binders canonically (``x0``, ``x1``, ... by binding
depth), so distinct outputs are distinct up to alpha-equivalence.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product
from typing import Iterator

from . import encodings as src
from .syntax import MAIN, NIL, Pop, Push, Term, Var
from .types import Arrow, arrow

DEFAULT_LOCS = (MAIN, "a")


# ---------------------------------------------------------------------------
# FMC terms


def _binder(depth: int) -> str:
    return f"x{depth}"


@lru_cache(maxsize=None)
def _terms(size: int, depth: int, locs: tuple) -> tuple:
    if size < 1:
        return ()
    if size == 1:
        return (NIL,)
    out = []
    for i in range(depth):
        for rest in _terms(size - 1, depth, locs):
            out.append(Term((Var(_binder(i)),) + rest.actions))
    for loc in locs:
        for rest in _terms(size - 1, depth + 1, locs):
            out.append(Term((Pop(loc, _binder(depth)),) + rest.actions))
    for arg_size in range(1, size - 1):
        args = _terms(arg_size, depth, locs)
        rests = _terms(size - 1 - arg_size, depth, locs)
        for loc in locs:
            for arg, rest in product(args, rests):
                out.append(Term((Push(arg, loc),) + rest.actions))
    return tuple(out)


def closed_terms(max_size: int, locs: tuple = DEFAULT_LOCS, min_size: int = 1) -> Iterator[Term]:
    """Every closed term of size in ``[min_size, max_size]``, smallest first."""
    for n in range(min_size, max_size + 1):
        yield from _terms(n, 0, tuple(locs))


def count_closed_terms(max_size: int, locs: tuple = DEFAULT_LOCS) -> int:
    return sum(len(_terms(n, 0, tuple(locs))) for n in range(1, max_size + 1))


def random_term(rng: random.Random, size: int, locs: tuple = DEFAULT_LOCS,
                scope: tuple = ()) -> Term:
    """A random term of roughly the given size; variables come from ``scope``."""
    acts = []
    scope = list(scope)
    budget = size
    while budget > 1:
        choices = ["pop", "push"] + (["var"] if scope else [])
        kind = rng.choice(choices)
        if kind == "var":
            acts.append(Var(rng.choice(scope)))
            budget -= 1
        elif kind == "pop":
            name = _binder(len(scope))
            acts.append(Pop(rng.choice(locs), name))
            scope.append(name)
            budget -= 1
        else:
            arg_size = rng.randint(1, max(1, budget - 2))
            acts.append(Push(random_term(rng, arg_size, locs, tuple(scope)), rng.choice(locs)))
            budget -= 1 + arg_size
    return Term(tuple(acts))


# ---------------------------------------------------------------------------
# Types


@lru_cache(maxsize=None)
def _types_of_size(size: int, depth: int, locs: tuple, bases: tuple, max_len: int) -> tuple:
    """Types of exactly ``size`` with nesting depth at most ``depth``."""
    out = [b for b in bases if size == 1]
    if depth >= 1 and size >= 1:
        slots = 2 * len(locs)
        for vecs in _slot_fill(size - 1, slots, depth - 1, locs, bases, max_len):
            ins = dict(zip(locs, vecs[:len(locs)]))
            outs = dict(zip(locs, vecs[len(locs):]))
            out.append(arrow(ins, outs))
    return tuple(dict.fromkeys(out))


def _slot_fill(budget: int, slots: int, depth: int, locs, bases, max_len):
    """Split ``budget`` over ``slots`` vectors of element types."""
    if slots == 0:
        if budget == 0:
            yield ()
        return
    for used in range(budget + 1):
        for vec in _vectors_of_size(used, depth, locs, bases, max_len):
            for rest in _slot_fill(budget - used, slots - 1, depth, locs, bases, max_len):
                yield (vec,) + rest


@lru_cache(maxsize=None)
def _vectors_of_size(size: int, depth: int, locs, bases, max_len) -> tuple:
    if size == 0:
        return ((),)
    if max_len == 0:
        return ()
    out = []
    for first in range(1, size + 1):
        for head in _types_of_size(first, depth, locs, bases, max_len):
            for tail in _vectors_of_size(size - first, depth, locs, bases, max_len - 1):
                out.append((head,) + tail)
    return tuple(out)


def arrow_types(max_depth: int, locs: tuple = (MAIN,), bases: tuple = (), max_len: int = 2,
                max_size: int = 6) -> list:
    """Arrow types of nesting depth at most ``max_depth`` and size at most ``max_size``."""
    out = []
    for n in range(1, max_size + 1):
        out.extend(t for t in _types_of_size(n, max_depth, tuple(locs), tuple(bases), max_len)
                   if isinstance(t, Arrow))
    return out


# ---------------------------------------------------------------------------
# Source programs


@lru_cache(maxsize=None)
def _src(size: int, depth: int, cells: tuple, ints: tuple, effects: bool) -> tuple:
    if size < 1:
        return ()
    out: list = []
    if size == 1:
        out.extend(src.Var(_binder(i)) for i in range(depth))
        out.extend(src.Int(i) for i in ints)
        if effects:
            out.append(src.Read())
            out.extend(src.Deref(c) for c in cells)
        return tuple(out)
    for body in _src(size - 1, depth + 1, cells, ints, effects):
        out.append(src.Lam(_binder(depth), body))
    for k in range(1, size - 1):
        lefts = _src(k, depth, cells, ints, effects)
        rights = _src(size - 1 - k, depth, cells, ints, effects)
        for a, b in product(lefts, rights):
            out.append(src.App(a, b))
            if effects:
                out.append(src.Write(a, b))
                out.extend(src.Assign(c, a, b) for c in cells)
                out.append(src.Choice("rnd", a, b))
    return tuple(out)


def source_programs(max_size: int, cells: tuple = ("a",), ints: tuple = (0, 1),
                    effects: bool = True) -> Iterator:
    """Closed programs of the lambda-calculus with effects, by size."""
    for n in range(1, max_size + 1):
        yield from _src(n, 0, tuple(cells), tuple(ints), effects)


def random_value(rng: random.Random, scope: list, depth: int = 2):
    """A source value: an integer, a bound variable or an abstraction."""
    kinds = ["int"] + (["var"] if scope else []) + (["lam"] if depth > 0 else [])
    kind = rng.choice(kinds)
    if kind == "int":
        return src.Int(rng.randint(0, 3))
    if kind == "var":
        return src.Var(rng.choice(scope))
    name = _binder(len(scope))
    return src.Lam(name, random_value(rng, scope + [name], depth - 1))


def random_computation(rng: random.Random, scope: list, depth: int = 3, cells: tuple = ("a", "b")):
    """A monadic computation built from effects, let and return."""
    if depth <= 0:
        return src.Return(random_value(rng, scope))
    kind = rng.choice(["return", "let", "write", "assign", "deref"])
    if kind == "return":
        return src.Return(random_value(rng, scope))
    if kind == "let":
        name = _binder(len(scope))
        bound = random_computation(rng, scope, depth - 1, cells)
        return src.Let(name, bound, random_computation(rng, scope + [name], depth - 1, cells))
    if kind == "write":
        return src.Write(random_value(rng, scope), random_computation(rng, scope, depth - 1, cells))
    if kind == "assign":
        return src.Assign(rng.choice(cells), random_value(rng, scope),
                          random_computation(rng, scope, depth - 1, cells))
    name = _binder(len(scope))
    return src.Let(name, src.Return(src.Deref(rng.choice(cells))),
                   random_computation(rng, scope + [name], depth - 1, cells))


def random_arrow(rng: random.Random, depth: int = 3):
    """A closed Arrow-calculus term built from arr, >>> and first."""
    if depth <= 0:
        return src.Arr(random_function(rng))
    kind = rng.choice(["arr", "compose", "first"])
    if kind == "arr":
        return src.Arr(random_function(rng))
    if kind == "compose":
        return src.ArrCompose(random_arrow(rng, depth - 1), random_arrow(rng, depth - 1))
    return src.First(random_arrow(rng, depth - 1))


def random_function(rng: random.Random):
    """A closed unary function for ``arr``: identity, constant or a swap-like projection."""
    return rng.choice([
        src.Lam("y", src.Var("y")),
        src.Lam("y", src.Int(rng.randint(0, 3))),
        src.Lam("y", src.Proj(1, src.Var("y"))),
        src.Lam("y", src.Pair(src.Var("y"), src.Int(0))),
        src.Lam("y", src.Lam("z", src.Var("y"))),
    ])
