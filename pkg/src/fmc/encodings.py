"""Translations of source calculi into the FMC.

One AST serves every source language; each mode has its own set of
admissible node types and the translator rejects anything outside it.
Supported modes: ``cbn`` (lambda-calculus with effects, products and the
monadic metalanguage), ``cbv`` (computational lambda-calculus with effects),
``cbpv``, ``arrow`` and ``kappa``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .syntax import (
    MAIN, NIL, Force, Lit, Pop, Push, Term, Thunk, Var as FVar,
    compose, compose_all, fresh_name, parse, pop, push, var,
)
from .types import B, EMPTY, Arrow, Base, FmcType, Z, arrow, print_type


# ---------------------------------------------------------------------------
# Source terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    name: str
    body: "Source"


@dataclass(frozen=True)
class App:
    fn: "Source"
    arg: "Source"


@dataclass(frozen=True)
class Int:
    value: int


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Pair:
    first: "Source"
    second: "Source"


@dataclass(frozen=True)
class Proj:
    index: int  # 1 or 2
    pair: "Source"


@dataclass(frozen=True)
class Read:
    pass


@dataclass(frozen=True)
class Write:
    value: "Source"
    body: "Source"


@dataclass(frozen=True)
class Assign:
    cell: str
    value: "Source"
    body: "Source"


@dataclass(frozen=True)
class Deref:
    cell: str


@dataclass(frozen=True)
class Choice:
    """``left (+) right`` on ``rnd`` or ``left + right`` on ``nd``."""

    loc: str
    left: "Source"
    right: "Source"


@dataclass(frozen=True)
class Return:
    body: "Source"


@dataclass(frozen=True)
class Let:
    name: str
    bound: "Source"
    body: "Source"


@dataclass(frozen=True)
class ThunkOf:
    body: "Source"


@dataclass(frozen=True)
class ForceOf:
    value: "Source"


@dataclass(frozen=True)
class To:
    bound: "Source"
    name: str
    body: "Source"


@dataclass(frozen=True)
class Arr:
    fn: "Source"


@dataclass(frozen=True)
class ArrCompose:
    first: "Source"
    second: "Source"


@dataclass(frozen=True)
class First:
    arrow: "Source"


@dataclass(frozen=True)
class PushV:
    value: "Source"


@dataclass(frozen=True)
class Kappa:
    name: str
    body: "Source"


@dataclass(frozen=True)
class MkThunk:
    body: "Source"


@dataclass(frozen=True)
class Apply:
    pass


@dataclass(frozen=True)
class Seq:
    first: "Source"
    second: "Source"


Source = Union[Var, Lam, App, Int, Unit, Pair, Proj, Read, Write, Assign, Deref, Choice,
               Return, Let, ThunkOf, ForceOf, To, Arr, ArrCompose, First, PushV, Kappa,
               MkThunk, Apply, Seq]

LAMBDA_CORE = {Var, Lam, App, Int}
EFFECTS = {Read, Write, Assign, Deref, Choice}
LANGUAGES = {
    "cbn": LAMBDA_CORE | EFFECTS | {Unit, Pair, Proj, Return, Let},
    "cbv": LAMBDA_CORE | EFFECTS | {Return, Let},
    "cbpv": {Var, Lam, App, Int, Unit, ThunkOf, ForceOf, Return, To},
    "arrow": LAMBDA_CORE | {Unit, Pair, Proj, Arr, ArrCompose, First},
    "kappa": {Var, Int, PushV, Kappa, MkThunk, Apply, Seq},
}


class ForeignConstruct(ValueError):
    """The term uses a construct outside the requested source language."""


def children(m: Source) -> list:
    return [getattr(m, f) for f in m.__dataclass_fields__ if not isinstance(getattr(m, f), (str, int))]


def source_size(m: Source) -> int:
    return 1 + sum(source_size(c) for c in children(m))


def source_fv(m: Source) -> set:
    if isinstance(m, Var):
        return {m.name}
    if isinstance(m, (Lam, Kappa)):
        return source_fv(m.body) - {m.name}
    if isinstance(m, Let):
        return source_fv(m.bound) | (source_fv(m.body) - {m.name})
    if isinstance(m, To):
        return source_fv(m.bound) | (source_fv(m.body) - {m.name})
    out = set()
    for c in children(m):
        out |= source_fv(c)
    return out


def cells(m: Source) -> set:
    out = {m.cell} if isinstance(m, (Assign, Deref)) else set()
    for c in children(m):
        out |= cells(c)
    return out


def check_language(m: Source, mode: str) -> None:
    allowed = LANGUAGES[mode]
    if type(m) not in allowed:
        raise ForeignConstruct(f"{type(m).__name__} is not part of the {mode} language")
    for c in children(m):
        check_language(c, mode)


# ---------------------------------------------------------------------------
# Printing


def print_source(m: Source) -> str:
    if isinstance(m, Var):
        return m.name
    if isinstance(m, Int):
        return str(m.value)
    if isinstance(m, Unit):
        return "()"
    if isinstance(m, Read):
        return "read"
    if isinstance(m, Apply):
        return "apply"
    if isinstance(m, Deref):
        return f"!{m.cell}"
    if isinstance(m, Lam):
        return f"\\{m.name}. {print_source(m.body)}"
    if isinstance(m, Kappa):
        return f"kappa {m.name}. {print_source(m.body)}"
    if isinstance(m, App):
        return f"{_atomic(m.fn, app_ok=True)} {_atomic(m.arg)}"
    if isinstance(m, Pair):
        return f"({print_source(m.first)}, {print_source(m.second)})"
    if isinstance(m, Proj):
        return f"{'fst' if m.index == 1 else 'snd'} {_atomic(m.pair)}"
    if isinstance(m, Write):
        return f"write {_atomic(m.value)}; {print_source(m.body)}"
    if isinstance(m, Assign):
        return f"{m.cell} := {_atomic(m.value)}; {print_source(m.body)}"
    if isinstance(m, Choice):
        op = "(+)" if m.loc == "rnd" else "+"
        return f"{_atomic(m.left, app_ok=True)} {op} {_atomic(m.right, app_ok=True)}"
    if isinstance(m, Return):
        return f"return {_atomic(m.body)}"
    if isinstance(m, Let):
        return f"let {m.name} = {print_source(m.bound)} in {print_source(m.body)}"
    if isinstance(m, ThunkOf):
        return f"thunk {_atomic(m.body)}"
    if isinstance(m, ForceOf):
        return f"force {_atomic(m.value)}"
    if isinstance(m, To):
        return f"{_atomic(m.bound, app_ok=True)} to {m.name}. {print_source(m.body)}"
    if isinstance(m, Arr):
        return f"arr {_atomic(m.fn)}"
    if isinstance(m, First):
        return f"first {_atomic(m.arrow)}"
    if isinstance(m, ArrCompose):
        return f"{_atomic(m.first, app_ok=True)} >>> {_atomic(m.second, app_ok=True)}"
    if isinstance(m, PushV):
        return f"push {_atomic(m.value)}"
    if isinstance(m, MkThunk):
        return f"mkthunk {_atomic(m.body)}"
    if isinstance(m, Seq):
        return f"{_atomic(m.first, app_ok=True)}; {print_source(m.second)}"
    raise TypeError(m)


def _atomic(m: Source, app_ok: bool = False) -> str:
    s = print_source(m)
    if isinstance(m, (Var, Int, Unit, Read, Apply, Deref, Pair)) or (app_ok and isinstance(m, App)):
        return s
    return f"({s})"


# ---------------------------------------------------------------------------
# Parsing


class SourceParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_SRC_TOKEN = re.compile(r"""\s*(?:
    (?P<op>\(\+\)|>>>|:=|[\\λ().,;!+=])
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
)""", re.VERBOSE)

KEYWORDS = {"let", "in", "return", "read", "write", "fst", "snd", "thunk", "force", "to",
            "arr", "first", "push", "kappa", "mkthunk", "apply"}
PREFIX = {"return": Return, "fst": lambda p: Proj(1, p), "snd": lambda p: Proj(2, p),
          "thunk": ThunkOf, "force": ForceOf, "arr": Arr, "first": First, "push": PushV,
          "mkthunk": MkThunk}


def _tokenize(text: str) -> list:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _SRC_TOKEN.match(text, pos)
        if not m:
            raise SourceParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        val, start = m.group(kind), m.start(kind)
        if kind == "ident" and val in KEYWORDS:
            kind = "kw"
        out.append((kind, val, start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _SourceParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, val: str) -> bool:
        return self.peek()[1] == val and self.peek()[0] in ("op", "kw")

    def expect(self, val: str):
        t = self.next()
        if t[1] != val:
            raise SourceParseError(f"expected {val!r}", t[2])
        return t

    def ident(self) -> str:
        t = self.next()
        if t[0] != "ident":
            raise SourceParseError("expected an identifier", t[2])
        return t[1]

    def expr(self) -> Source:
        left = self.binder()
        if self.at(";") and not isinstance(left, (Write, Assign)):
            self.next()
            return Seq(left, self.expr())
        return left

    def binder(self) -> Source:
        kind, val, pos = self.peek()
        if val in ("\\", "λ"):
            self.next()
            names = [self.ident()]
            while self.peek()[0] == "ident":
                names.append(self.ident())
            self.expect(".")
            body = self.expr()
            for n in reversed(names):
                body = Lam(n, body)
            return body
        if val == "kappa":
            self.next()
            name = self.ident()
            self.expect(".")
            return Kappa(name, self.expr())
        if val == "let":
            self.next()
            name = self.ident()
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            return Let(name, bound, self.expr())
        if val == "write":
            self.next()
            value = self.arrows()
            self.expect(";")
            return Write(value, self.expr())
        if kind == "ident" and self.peek(1)[1] == ":=":
            self.next()
            self.next()
            value = self.arrows()
            self.expect(";")
            return Assign(val, value, self.expr())
        return self.arrows()

    def arrows(self) -> Source:
        left = self.choice()
        while self.at(">>>"):
            self.next()
            left = ArrCompose(left, self.choice())
        return left

    def choice(self) -> Source:
        left = self.to_expr()
        while self.at("(+)") or self.at("+"):
            loc = "rnd" if self.next()[1] == "(+)" else "nd"
            left = Choice(loc, left, self.to_expr())
        return left

    def to_expr(self) -> Source:
        left = self.app()
        if self.at("to"):
            self.next()
            name = self.ident()
            self.expect(".")
            return To(left, name, self.expr())
        return left

    def app(self) -> Source:
        fn = self.prefix()
        while self._starts_atom():
            fn = App(fn, self.prefix())
        return fn

    def _starts_atom(self) -> bool:
        kind, val, _ = self.peek()
        if kind in ("ident", "int"):
            return not (kind == "ident" and self.peek(1)[1] == ":=")
        if kind == "kw":
            return val in PREFIX or val in ("read", "apply")
        return val in ("(", "!")

    def prefix(self) -> Source:
        kind, val, pos = self.peek()
        if kind == "kw" and val in PREFIX:
            self.next()
            return PREFIX[val](self.prefix())
        return self.atom()

    def atom(self) -> Source:
        kind, val, pos = self.next()
        if kind == "ident":
            return Var(val)
        if kind == "int":
            return Int(int(val))
        if val == "read":
            return Read()
        if val == "apply":
            return Apply()
        if val == "!":
            return Deref(self.ident())
        if val == "(":
            if self.at(")"):
                self.next()
                return Unit()
            inner = self.expr()
            if self.at(","):
                self.next()
                second = self.expr()
                self.expect(")")
                return Pair(inner, second)
            self.expect(")")
            return inner
        raise SourceParseError(f"unexpected {val or 'end of input'!r}", pos)


def parse_source(text: str) -> Source:
    p = _SourceParser(text)
    m = p.expr()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise SourceParseError(f"unexpected {val!r}", pos)
    return m


# ---------------------------------------------------------------------------
# Call-by-name


NAME_POOL = ("x", "y", "z", "u", "v", "w")


def _pick(scope, *terms) -> str:
    """A binder name unused by enclosing source binders and free in none of ``terms``."""
    avoid = set(scope)
    for t in terms:
        avoid |= t.fv
    for name in NAME_POOL:
        if name not in avoid:
            return name
    return fresh_name("x", avoid)


def _projection(i: int) -> Term:
    return pop(MAIN, "x1", pop(MAIN, "x2", var(f"x{i}")))


def encode_cbn(m: Source) -> Term:
    check_language(m, "cbn")
    return _cbn(m, frozenset())


def _cbn(m: Source, scope: frozenset) -> Term:
    if isinstance(m, Var):
        return var(m.name)
    if isinstance(m, Lam):
        return pop(MAIN, m.name, _cbn(m.body, scope | {m.name}))
    if isinstance(m, App):
        return push(_cbn(m.arg, scope), MAIN, _cbn(m.fn, scope))
    if isinstance(m, Int):
        return Term((Lit(m.value),))
    if isinstance(m, Unit):
        return NIL
    if isinstance(m, Pair):
        return push(_cbn(m.second, scope), MAIN, push(_cbn(m.first, scope)))
    if isinstance(m, Proj):
        return compose(_cbn(m.pair, scope), _projection(m.index))
    if isinstance(m, Read):
        x = _pick(scope)
        return pop("in", x, var(x))
    if isinstance(m, Write):
        return push(_cbn(m.value, scope), "out", _cbn(m.body, scope))
    if isinstance(m, Assign):
        return pop(m.cell, "_", push(_cbn(m.value, scope), m.cell, _cbn(m.body, scope)))
    if isinstance(m, Deref):
        x = _pick(scope)
        return pop(m.cell, x, push(var(x), m.cell, var(x)))
    if isinstance(m, Choice):
        left, right = _cbn(m.left, scope), _cbn(m.right, scope)
        x = _pick(scope, left, right)
        return pop(m.loc, x, push(left, MAIN, push(right, MAIN, var(x))))
    if isinstance(m, Return):
        return push(_cbn(m.body, scope))
    if isinstance(m, Let):
        return compose(_cbn(m.bound, scope), pop(MAIN, m.name, _cbn(m.body, scope | {m.name})))
    raise ForeignConstruct(type(m).__name__)


# ---------------------------------------------------------------------------
# Call-by-value


def encode_cbv(m: Source) -> Term:
    check_language(m, "cbv")
    return _cbv(m, frozenset())


def _cbv(m: Source, scope: frozenset) -> Term:
    if isinstance(m, Var):
        return push(var(m.name))
    if isinstance(m, Int):
        return push(Term((Lit(m.value),)))
    if isinstance(m, Lam):
        return push(pop(MAIN, m.name, _cbv(m.body, scope | {m.name})))
    if isinstance(m, App):
        x = _pick(scope)
        return compose_all([_cbv(m.arg, scope), _cbv(m.fn, scope), pop(MAIN, x, var(x))])
    if isinstance(m, Return):
        return push(_cbv(m.body, scope))
    if isinstance(m, Let):
        return compose(_cbv(m.bound, scope), pop(MAIN, m.name, _cbv(m.body, scope | {m.name})))
    if isinstance(m, Read):
        x = _pick(scope)
        return pop("in", x, push(var(x)))
    if isinstance(m, Write):
        body = _cbv(m.body, scope)
        x = _pick(scope, body)
        return compose(_cbv(m.value, scope), pop(MAIN, x, push(var(x), "out", body)))
    if isinstance(m, Assign):
        body = _cbv(m.body, scope)
        x = _pick(scope, body)
        return compose(_cbv(m.value, scope), pop(MAIN, x, pop(m.cell, "_", push(var(x), m.cell, body))))
    if isinstance(m, Deref):
        x = _pick(scope)
        return pop(m.cell, x, push(var(x), m.cell, push(var(x))))
    if isinstance(m, Choice):
        left, right = _cbv(m.left, scope), _cbv(m.right, scope)
        x = _pick(scope, left, right)
        return pop(m.loc, x, push(right, MAIN, push(left, MAIN, var(x))))
    raise ForeignConstruct(type(m).__name__)


# ---------------------------------------------------------------------------
# Call-by-push-value, Arrows, kappa-calculus


class ThunksDisabled(ValueError):
    pass


def encode_cbpv(m: Source, features=("thunks",)) -> Term:
    if "thunks" not in features:
        raise ThunksDisabled("call-by-push-value needs the thunks feature")
    check_language(m, "cbpv")
    return _cbpv(m)


def _cbpv_value(v: Source):
    if isinstance(v, Var):
        return var(v.name)
    if isinstance(v, ThunkOf):
        return Thunk(_cbpv(v.body))
    if isinstance(v, Int):
        return Term((Lit(v.value),))
    raise ForeignConstruct(f"{type(v).__name__} is not a value")


def _cbpv(m: Source) -> Term:
    if isinstance(m, Unit):
        return NIL
    if isinstance(m, ForceOf):
        v = _cbpv_value(m.value)
        return Term((Force(v if isinstance(v, Thunk) else v.actions[0].name),))
    if isinstance(m, Return):
        return push(_cbpv_value(m.body))
    if isinstance(m, To):
        return compose(_cbpv(m.bound), pop(MAIN, m.name, _cbpv(m.body)))
    if isinstance(m, Lam):
        return pop(MAIN, m.name, _cbpv(m.body))
    if isinstance(m, App):
        return push(_cbpv_value(m.arg), MAIN, _cbpv(m.fn))
    raise ForeignConstruct(f"{type(m).__name__} is not a computation")


def encode_arrow(m: Source) -> Term:
    check_language(m, "arrow")
    return _arrow(m)


def _arrow(m: Source) -> Term:
    if isinstance(m, Arr):
        fn = _arrow(m.fn)
        x = _pick((), fn)
        return pop(MAIN, x, push(push(var(x), MAIN, fn)))
    if isinstance(m, ArrCompose):
        return compose(_arrow(m.first), _arrow(m.second))
    if isinstance(m, First):
        p = _arrow(m.arrow)
        x = _pick((), p)
        return pop(MAIN, x, push(var(x, p)))
    if isinstance(m, Var):
        return var(m.name)
    if isinstance(m, Lam):
        return pop(MAIN, m.name, _arrow(m.body))
    if isinstance(m, App):
        return push(_arrow(m.arg), MAIN, _arrow(m.fn))
    if isinstance(m, Int):
        return Term((Lit(m.value),))
    if isinstance(m, Unit):
        return NIL
    if isinstance(m, Pair):
        return push(_arrow(m.second), MAIN, push(_arrow(m.first)))
    if isinstance(m, Proj):
        return compose(_arrow(m.pair), _projection(m.index))
    raise ForeignConstruct(type(m).__name__)


def encode_kappa(m: Source, features=("thunks",)) -> Term:
    check_language(m, "kappa")
    if "thunks" not in features and _uses_thunks(m):
        raise ThunksDisabled("mkthunk and apply need the thunks feature")
    return _kappa(m)


def _uses_thunks(m: Source) -> bool:
    return isinstance(m, (MkThunk, Apply)) or any(_uses_thunks(c) for c in children(m))


def _kappa_value(v: Source):
    if isinstance(v, Var):
        return var(v.name)
    if isinstance(v, Int):
        return Term((Lit(v.value),))
    if isinstance(v, MkThunk):
        return Thunk(_kappa(v.body))
    raise ForeignConstruct(f"{type(v).__name__} cannot be pushed")


def _kappa(m: Source) -> Term:
    if isinstance(m, PushV):
        return push(_kappa_value(m.value))
    if isinstance(m, Kappa):
        return pop(MAIN, m.name, _kappa(m.body))
    if isinstance(m, MkThunk):
        return push(Thunk(_kappa(m.body)))
    if isinstance(m, Apply):
        return pop(MAIN, "x", Term((Force("x"),)))
    if isinstance(m, Seq):
        return compose(_kappa(m.first), _kappa(m.second))
    raise ForeignConstruct(f"{type(m).__name__} is not a kappa-calculus term")


ENCODERS = {"cbn": encode_cbn, "cbv": encode_cbv, "cbpv": encode_cbpv,
            "arrow": encode_arrow, "kappa": encode_kappa}


def encode(m: Source, mode: str, features=("thunks",)) -> Term:
    if mode not in ENCODERS:
        raise ValueError(f"unknown mode {mode!r}")
    if mode in ("cbpv", "kappa"):
        return ENCODERS[mode](m, features)
    return ENCODERS[mode](m)


# ---------------------------------------------------------------------------
# Programming sugar


def desugar(text: str, features=("consts",)) -> Term:
    """Parse a term that may use print/read/rand/get/set and ``(x=N);M``.

    The FMC parser expands the sugar while parsing, so this is the parser
    with the requested features switched on.
    """
    return parse(text, features)


# ---------------------------------------------------------------------------
# Source types


@dataclass(frozen=True)
class TBase:
    name: str  # o, Z, B


@dataclass(frozen=True)
class TUnit:
    pass


@dataclass(frozen=True)
class TFun:
    arg: "SourceType"
    result: "SourceType"


@dataclass(frozen=True)
class TProd:
    left: "SourceType"
    right: "SourceType"


@dataclass(frozen=True)
class TMonad:
    body: "SourceType"


@dataclass(frozen=True)
class TF:
    """CBPV computation type of a returned value."""

    body: "SourceType"


@dataclass(frozen=True)
class TU:
    """CBPV value type of a thunked computation."""

    body: "SourceType"


@dataclass(frozen=True)
class TArrow:
    """Arrow-calculus ``rho ~> sigma``."""

    arg: "SourceType"
    result: "SourceType"


SourceType = Union[TBase, TUnit, TFun, TProd, TMonad, TF, TU, TArrow]
O = TBase("o")

TYPE_LANGUAGES = {
    "cbn": {TBase, TUnit, TFun, TProd, TMonad},
    "cbv": {TBase, TFun, TMonad},
    "cbpv": {TBase, TUnit, TFun, TF, TU},
    "arrow": {TBase, TUnit, TFun, TProd, TArrow},
}


def print_source_type(t: SourceType) -> str:
    if isinstance(t, TBase):
        return t.name
    if isinstance(t, TUnit):
        return "1"
    if isinstance(t, TFun):
        return f"{_tatom(t.arg)} -> {print_source_type(t.result)}"
    if isinstance(t, TArrow):
        return f"{_tatom(t.arg)} ~> {print_source_type(t.result)}"
    if isinstance(t, TProd):
        return f"{_tatom(t.left)} * {_tatom(t.right)}"
    name = {TMonad: "T", TF: "F", TU: "U"}[type(t)]
    return f"{name} {_tatom(t.body)}"


def _tatom(t: SourceType) -> str:
    s = print_source_type(t)
    return s if isinstance(t, (TBase, TUnit)) else f"({s})"


def _base(t: TBase) -> FmcType:
    if t.name == "o":
        return EMPTY
    return {"Z": Z, "B": B}.get(t.name, Base(t.name))


def _prepend_input(arg: FmcType, result: FmcType) -> Arrow:
    if not isinstance(result, Arrow):
        raise ForeignConstruct(
            f"result type {print_type(result)} is a constant type; only call-by-value "
            "translates terms returning constants")
    ins = dict(result.inputs)
    ins[MAIN] = (arg,) + ins.get(MAIN, ())
    return arrow(ins, dict(result.outputs))


def encode_types(t: SourceType, mode: str) -> FmcType:
    allowed = TYPE_LANGUAGES.get(mode)
    if allowed is None:
        raise ValueError(f"unknown mode {mode!r}")

    def go(t):
        if type(t) not in allowed:
            raise ForeignConstruct(f"{type(t).__name__} is not a {mode} type")
        if isinstance(t, TBase):
            return _base(t)
        if isinstance(t, TUnit):
            return EMPTY
        if mode == "cbv":
            if isinstance(t, TFun):
                return arrow([go(t.arg)], [go(t.result)])
            return arrow([], [go(t.body)])
        if isinstance(t, TFun):
            return _prepend_input(go(t.arg), go(t.result))
        if isinstance(t, TProd):
            return arrow([], [go(t.right), go(t.left)])
        if isinstance(t, (TMonad, TF)):
            return arrow([], [go(t.body)])
        if isinstance(t, TU):
            return go(t.body)
        if isinstance(t, TArrow):
            return arrow([go(t.arg)], [go(t.result)])
        raise ForeignConstruct(type(t).__name__)

    return go(t)


def cbv_term_type(t: SourceType) -> Arrow:
    """Type of the translation of a CBV term of source type ``t``."""
    return arrow([], [encode_types(t, "cbv")])
