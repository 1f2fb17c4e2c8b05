"""Direct interpreters for the source languages.

They share no code with the encoders or the machine and serve as reference
semantics for the adequacy tests.

* ``eval_cbn``: weak-head call-by-name evaluation by substitution, with a
  store, an output list, an input list and choice streams.
* ``eval_cbv``: environment-based call-by-value evaluation with closures.

Both raise ``OracleStuck`` when a closed program goes wrong (empty input,
applying a number, ...) so callers can skip such programs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .encodings import (
    App, Assign, Choice, Deref, Int, Lam, Let, Pair, Proj, Read, Source, Unit,
    Var, Write,
)


class OracleStuck(Exception):
    pass


class OracleFuel(Exception):
    pass


@dataclass
class World:
    """Effects: cell contents, output so far, remaining input, choice bits."""

    store: dict = field(default_factory=dict)
    output: list = field(default_factory=list)
    input: list = field(default_factory=list)
    choices: dict = field(default_factory=dict)  # loc -> list of bools, consumed from the front

    def choose(self, loc: str) -> bool:
        bits = self.choices.get(loc)
        if not bits:
            raise OracleStuck(f"no choice available on {loc}")
        return bits.pop(0)


# ---------------------------------------------------------------------------
# Call-by-name


def _fresh(name: str, avoid: set) -> str:
    while name in avoid:
        name += "'"
    return name


def free(m: Source) -> set:
    if isinstance(m, Var):
        return {m.name}
    if isinstance(m, Lam):
        return free(m.body) - {m.name}
    if isinstance(m, Let):
        return free(m.bound) | (free(m.body) - {m.name})
    out = set()
    for f in m.__dataclass_fields__:
        c = getattr(m, f)
        if not isinstance(c, (str, int)):
            out |= free(c)
    return out


def subst(m: Source, x: str, n: Source) -> Source:
    """Capture-avoiding ``m[n/x]`` on source terms."""
    if isinstance(m, Var):
        return n if m.name == x else m
    if isinstance(m, (Lam, Let)):
        bound = subst(m.bound, x, n) if isinstance(m, Let) else None
        y, body = m.name, m.body
        if y != x:
            if y in free(n):
                z = _fresh(y, free(n) | free(body) | {x})
                body, y = subst(body, y, Var(z)), z
            body = subst(body, x, n)
        return Let(y, bound, body) if isinstance(m, Let) else Lam(y, body)
    kwargs = {}
    for f in m.__dataclass_fields__:
        c = getattr(m, f)
        kwargs[f] = c if isinstance(c, (str, int)) else subst(c, x, n)
    return type(m)(**kwargs)


def eval_cbn(m: Source, world: World, fuel: int = 10_000):
    """Evaluate to weak head normal form.

    Returns the head and the arguments it was not applied to (innermost
    last), which is what the machine leaves on the main stack.
    """
    args: list = []  # top of the argument stack at the end
    for _ in range(fuel):
        if isinstance(m, App):
            args.append(m.arg)
            m = m.fn
        elif isinstance(m, Lam):
            if not args:
                return m, args
            m = subst(m.body, m.name, args.pop())
        elif isinstance(m, (Int, Unit, Pair)):
            return m, args
        elif isinstance(m, Proj):
            pair, rest = eval_cbn(m.pair, world, fuel)
            if not isinstance(pair, Pair) or rest:
                raise OracleStuck("projection of a non-pair")
            m = pair.first if m.index == 1 else pair.second
        elif isinstance(m, Read):
            if not world.input:
                raise OracleStuck("input exhausted")
            m = world.input.pop(0)
        elif isinstance(m, Write):
            world.output.append(m.value)
            m = m.body
        elif isinstance(m, Assign):
            world.store[m.cell] = m.value
            m = m.body
        elif isinstance(m, Deref):
            if m.cell not in world.store:
                raise OracleStuck(f"unset cell {m.cell}")
            m = world.store[m.cell]
        elif isinstance(m, Choice):
            # the Church boolean true picks the right-hand summand
            m = m.right if world.choose(m.loc) else m.left
        elif isinstance(m, Var):
            raise OracleStuck(f"free variable {m.name}")
        else:
            raise OracleStuck(f"no rule for {type(m).__name__}")
    raise OracleFuel("call-by-name oracle ran out of fuel")


# ---------------------------------------------------------------------------
# Call-by-value


@dataclass(frozen=True)
class Closure:
    name: str
    body: Source
    env: tuple  # ((name, value), ...)


def eval_cbv(m: Source, world: World, fuel: int = 10_000):
    """Evaluate to a value: an ``int`` or a Closure."""
    budget = [fuel]
    return _cbv(m, {}, world, budget)


def _cbv(m: Source, env: dict, world: World, budget: list):
    budget[0] -= 1
    if budget[0] < 0:
        raise OracleFuel("call-by-value oracle ran out of fuel")
    if isinstance(m, Var):
        if m.name not in env:
            raise OracleStuck(f"free variable {m.name}")
        return env[m.name]
    if isinstance(m, Int):
        return m.value
    if isinstance(m, Lam):
        return Closure(m.name, m.body, tuple(sorted(env.items(), key=lambda kv: kv[0])))
    if isinstance(m, App):
        # the argument is evaluated before the function
        arg = _cbv(m.arg, env, world, budget)
        fn = _cbv(m.fn, env, world, budget)
        if not isinstance(fn, Closure):
            raise OracleStuck("applying a non-function")
        return _cbv(fn.body, {**dict(fn.env), fn.name: arg}, world, budget)
    if isinstance(m, Let):
        bound = _cbv(m.bound, env, world, budget)
        return _cbv(m.body, {**env, m.name: bound}, world, budget)
    if isinstance(m, Read):
        if not world.input:
            raise OracleStuck("input exhausted")
        item = world.input.pop(0)
        return item.value if isinstance(item, Int) else item
    if isinstance(m, Write):
        world.output.append(_cbv(m.value, env, world, budget))
        return _cbv(m.body, env, world, budget)
    if isinstance(m, Assign):
        world.store[m.cell] = _cbv(m.value, env, world, budget)
        return _cbv(m.body, env, world, budget)
    if isinstance(m, Deref):
        if m.cell not in world.store:
            raise OracleStuck(f"unset cell {m.cell}")
        return world.store[m.cell]
    if isinstance(m, Choice):
        # here true picks the left-hand summand
        return _cbv(m.left if world.choose(m.loc) else m.right, env, world, budget)
    raise OracleStuck(f"no rule for {type(m).__name__}")
