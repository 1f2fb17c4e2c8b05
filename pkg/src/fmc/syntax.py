"""Terms of the Functional Machine Calculus.

A term is stored as a flat sequence of *actions* terminated by nil::

    M ::= *  |  x.M  |  [N]a.M  |  a<x>.M

so ``x.[y]a.b<z>.*`` is ``Term((Var('x'), Push(y, 'a'), Pop('b', 'z')))``.
Head contexts are then just action prefixes, composition is concatenation
(plus renaming), and a redex is a pair of indices into one sequence.

Names are kept as strings.  Alpha-equivalence is decided by a locally
nameless key (binders replaced by their depth), and renamed binders get the
smallest unused primed name, so output is deterministic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Union

MAIN = "λ"
MAIN_ALIASES = ("~", "λ", "")

# binder that never occurs; `_` is not a legal variable occurrence
WILDCARD = "_"


# ---------------------------------------------------------------------------
# Actions


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Push:
    arg: "Value"
    loc: str = MAIN
    mark: int | None = None


@dataclass(frozen=True)
class Pop:
    loc: str
    name: str
    mark: int | None = None


@dataclass(frozen=True)
class Force:
    """``?V`` with V a variable name or a thunk (``thunks`` feature)."""

    value: "str | Thunk"


@dataclass(frozen=True)
class Lit:
    """Integer or boolean constant (``consts`` feature)."""

    value: int | bool


@dataclass(frozen=True)
class Prim:
    """Primitive operator acting on the main stack (``consts`` feature)."""

    name: str


PRIM_ARITY = {"+": 2, "-": 2, "mul": 2, "if": 3}

Action = Union[Var, Push, Pop, Force, Lit, Prim]


@dataclass(frozen=True)
class Term:
    actions: tuple = ()

    @cached_property
    def fv(self) -> frozenset:
        return frozenset(_free_vars(self.actions))

    @cached_property
    def size(self) -> int:
        n = 1
        for act in self.actions:
            n += 1
            if isinstance(act, Push):
                n += value_size(act.arg)
            elif isinstance(act, Force) and isinstance(act.value, Thunk):
                n += act.value.body.size
        return n

    def __str__(self) -> str:
        return print_term(self)

    def __repr__(self) -> str:
        return f"Term({print_term(self)!r})"

    def __len__(self) -> int:
        return len(self.actions)

    def __iter__(self) -> Iterator[Action]:
        return iter(self.actions)


@dataclass(frozen=True)
class Thunk:
    """A suspended computation ``!{M}``: a value that can be forced."""

    body: Term

    def __str__(self) -> str:
        return "!{" + print_term(self.body) + "}"


Value = Union[Term, Thunk]

NIL = Term(())


def value_size(v: Value) -> int:
    return v.size if isinstance(v, Term) else 1 + v.body.size


def value_fv(v: Value) -> frozenset:
    return v.fv if isinstance(v, Term) else v.body.fv


def _free_vars(actions) -> set:
    fv: set = set()
    for act in reversed(actions):
        if isinstance(act, Var):
            fv.add(act.name)
        elif isinstance(act, Push):
            fv |= value_fv(act.arg)
        elif isinstance(act, Pop):
            fv.discard(act.name)
        elif isinstance(act, Force):
            if isinstance(act.value, Thunk):
                fv |= act.value.body.fv
            else:
                fv.add(act.value)
    return fv


# Builders mirroring the grammar ----------------------------------------------


def nil() -> Term:
    return NIL


def var(name: str, rest: Term = NIL) -> Term:
    return Term((Var(name),) + rest.actions)


def push(arg: Value, loc: str = MAIN, rest: Term = NIL) -> Term:
    return Term((Push(arg, loc),) + rest.actions)


def pop(loc: str, name: str, rest: Term = NIL) -> Term:
    return Term((Pop(loc, name),) + rest.actions)


def lit(value: int | bool) -> Term:
    return Term((Lit(value),))


def prepend(actions: Iterable[Action], term: Term) -> Term:
    return Term(tuple(actions) + term.actions)


# ---------------------------------------------------------------------------
# Head contexts


@dataclass(frozen=True)
class HeadContext:
    """A prefix of push and pop actions with a hole at the end."""

    actions: tuple = ()

    def __post_init__(self):
        for act in self.actions:
            if not isinstance(act, (Push, Pop)):
                raise ValueError(f"head contexts hold only pushes and pops, got {act}")

    def plug(self, term: Term) -> Term:
        return plug(self, term)

    def __str__(self) -> str:
        body = print_term(Term(self.actions))
        return "{}" if not self.actions else body + ".{}"


HOLE = HeadContext()


def plug(context: HeadContext, term: Term) -> Term:
    # binders of the context deliberately capture in the term
    return Term(context.actions + term.actions)


def bv(context: HeadContext) -> set:
    return {a.name for a in context.actions if isinstance(a, Pop)}


def loc(context: HeadContext) -> set:
    """Locations of the context's own actions (not those inside arguments)."""
    return {a.loc for a in context.actions}


def free_vars(term: Value) -> set:
    return set(value_fv(term))


def locations(term: Value) -> set:
    if isinstance(term, Thunk):
        return locations(term.body)
    out = set()
    for act in term.actions:
        if isinstance(act, Push):
            out.add(act.loc)
            out |= locations(act.arg)
        elif isinstance(act, Pop):
            out.add(act.loc)
        elif isinstance(act, Force) and isinstance(act.value, Thunk):
            out |= locations(act.value.body)
        elif isinstance(act, Prim):
            out.add(MAIN)
    return out


def all_names(term: Value) -> set:
    """Every variable name occurring in a term, bound or free."""
    if isinstance(term, Thunk):
        return all_names(term.body)
    out = set()
    for act in term.actions:
        if isinstance(act, Var):
            out.add(act.name)
        elif isinstance(act, Pop):
            out.add(act.name)
        elif isinstance(act, Push):
            out |= all_names(act.arg)
        elif isinstance(act, Force):
            out |= all_names(act.value) if isinstance(act.value, Thunk) else {act.value}
    return out


# ---------------------------------------------------------------------------
# Fresh names, substitution, composition


def fresh_name(base: str, avoid) -> str:
    """Smallest primed variant of ``base`` not in ``avoid``."""
    if base == WILDCARD:
        base = "x"
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def rename(term: Term, old: str, new: str) -> Term:
    """Rename free occurrences of ``old``; ``new`` must not occur in term."""
    return substitute(Term((Var(new),)), old, term)


def substitute(value: Value, name: str, target: Term) -> Term:
    """Capture-avoiding substitution ``{value/name}target``.

    A variable occurrence ``x.N`` becomes ``value ; {value/x}N``.  Substituting
    a thunk turns ``x.N`` and ``?x.N`` into ``?!{..}.N``, and a pushed ``[x]``
    into the pushed thunk itself.
    """
    if name == WILDCARD or name not in target.fv:
        return target
    vfv = value_fv(value)
    out: list = []
    actions = target.actions
    for k, act in enumerate(actions):
        if isinstance(act, Var) or (isinstance(act, Force) and act.value == name):
            if act_name(act) != name:
                out.append(act)
                continue
            if isinstance(value, Thunk):
                out.append(Force(value))
                continue
            if isinstance(act, Force) and len(value.actions) == 1 and isinstance(value.actions[0], Var):
                out.append(Force(value.actions[0].name))
                continue
            rest = substitute(value, name, Term(actions[k + 1:]))
            return Term(tuple(out) + compose(value, rest).actions)
        if isinstance(act, Push):
            out.append(Push(_subst_value(value, name, act.arg), act.loc, act.mark))
        elif isinstance(act, Pop):
            if act.name == name:
                out.extend(actions[k:])
                break
            if act.name in vfv:
                rest = Term(actions[k + 1:])
                new = fresh_name(act.name, vfv | rest.fv | {name})
                rest = substitute(value, name, rename(rest, act.name, new))
                return Term(tuple(out) + (Pop(act.loc, new, act.mark),) + rest.actions)
            out.append(act)
        elif isinstance(act, Force) and isinstance(act.value, Thunk):
            out.append(Force(Thunk(substitute(value, name, act.value.body))))
        else:
            out.append(act)
    return Term(tuple(out))


def act_name(act) -> str | None:
    if isinstance(act, Var):
        return act.name
    if isinstance(act, Force) and isinstance(act.value, str):
        return act.value
    return None


def _subst_value(value: Value, name: str, arg: Value) -> Value:
    if isinstance(arg, Thunk):
        return Thunk(substitute(value, name, arg.body))
    if isinstance(value, Thunk) and arg.actions == (Var(name),):
        return value
    return substitute(value, name, arg)


def compose(first: Value, second: Term) -> Term:
    """Capture-avoiding composition ``first ; second``."""
    if isinstance(first, Thunk):
        return Term((Force(first),) + second.actions)
    if not first.actions:
        return second
    if not second.actions:
        return first
    sfv = second.fv
    actions = first.actions
    out: list = []
    for k, act in enumerate(actions):
        if isinstance(act, Pop) and act.name in sfv:
            rest = Term(actions[k + 1:])
            new = fresh_name(act.name, sfv | rest.fv | all_names(second))
            rest = rename(rest, act.name, new)
            tail = compose(rest, second)
            return Term(tuple(out) + (Pop(act.loc, new, act.mark),) + tail.actions)
        out.append(act)
    return Term(tuple(out) + second.actions)


def compose_all(terms: Iterable[Term]) -> Term:
    terms = list(terms)
    acc = NIL
    for t in reversed(terms):
        acc = compose(t, acc)
    return acc


# ---------------------------------------------------------------------------
# Alpha-equivalence


def alpha_key(term: Value, env: dict | None = None, depth: int = 0):
    """Locally nameless key: equal keys iff alpha-equivalent terms."""
    if isinstance(term, Thunk):
        return ("!", alpha_key(term.body, env, depth))
    env = dict(env or {})
    out = []
    for act in term.actions:
        if isinstance(act, Var):
            out.append(("v", env.get(act.name, act.name)))
        elif isinstance(act, Push):
            out.append(("p", act.loc, alpha_key(act.arg, env, depth), act.mark))
        elif isinstance(act, Pop):
            out.append(("b", act.loc, act.mark))
            env[act.name] = depth
            depth += 1
        elif isinstance(act, Force):
            v = act.value
            out.append(("?", alpha_key(v, env, depth) if isinstance(v, Thunk) else env.get(v, v)))
        elif isinstance(act, Lit):
            out.append(("c", type(act.value).__name__, act.value))
        else:
            out.append(("o", act.name))
    return tuple(out)


def alpha_eq(m: Value, n: Value) -> bool:
    return alpha_key(m) == alpha_key(n)


def strip_marks(term: Value) -> Value:
    if isinstance(term, Thunk):
        return Thunk(strip_marks(term.body))
    out = []
    for act in term.actions:
        if isinstance(act, Push):
            act = Push(strip_marks(act.arg), act.loc)
        elif isinstance(act, Pop) and act.mark is not None:
            act = Pop(act.loc, act.name)
        elif isinstance(act, Force) and isinstance(act.value, Thunk):
            act = Force(strip_marks(act.value))
        out.append(act)
    return Term(tuple(out))


# ---------------------------------------------------------------------------
# Printing


def print_loc(name: str) -> str:
    return "" if name == MAIN else name


def print_value(v: Value) -> str:
    return str(v) if isinstance(v, Thunk) else print_term(v)


def print_action(act: Action) -> str:
    if isinstance(act, Var):
        return act.name
    if isinstance(act, Push):
        return "[" + print_value(act.arg) + "]" + print_loc(act.loc)
    if isinstance(act, Pop):
        return print_loc(act.loc) + "<" + act.name + ">"
    if isinstance(act, Force):
        return "?" + (str(act.value) if isinstance(act.value, Thunk) else act.value)
    if isinstance(act, Lit):
        if isinstance(act.value, bool):
            return "true" if act.value else "false"
        return str(act.value)
    return act.name


def print_term(term: Term, highlight: dict | None = None) -> str:
    """Canonical rendering; the trailing ``.*`` is omitted.

    ``highlight`` maps an action position (path tuple) to a pair of strings
    wrapped around that action; used to bracket redexes in reduction logs.
    """
    return _print(term, highlight or {}, ())


def _print(term: Term, highlight: dict, path: tuple) -> str:
    if not term.actions:
        return "*"
    parts = []
    for i, act in enumerate(term.actions):
        if isinstance(act, Push) and isinstance(act.arg, Term) and highlight:
            s = "[" + _print(act.arg, highlight, path + (i,)) + "]" + print_loc(act.loc)
        else:
            s = print_action(act)
        if path + (i,) in highlight:
            left, right = highlight[path + (i,)]
            s = left + s + right
        parts.append(s)
    return ".".join(parts)


# ---------------------------------------------------------------------------
# Parsing


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


FEATURES = frozenset({"thunks", "consts"})

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*|_)
  | (?P<sym>!\{|[*.;\[\]<>()=?{}+\-×~λ])
    """,
    re.VERBOSE,
)

SUGAR = ("print", "read", "rand", "get", "set")
CONST_WORDS = {"true": True, "false": False}
PRIM_WORDS = {"if": "if", "mul": "mul"}


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, features):
        self.text = text
        self.features = frozenset(features)
        unknown = self.features - FEATURES
        if unknown:
            raise ValueError(f"unknown features: {sorted(unknown)}")
        self.tokens = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def at(self, value: str, k: int = 0) -> bool:
        kind, val, _ = self.peek(k)
        return kind in ("sym", "ident") and val == value

    def expect(self, value: str):
        kind, val, pos = self.next()
        if val != value or kind not in ("sym", "ident"):
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos, self.text)

    def error(self, message: str):
        raise ParseError(message, self.peek()[2], self.text)

    def need(self, feature: str, what: str):
        if feature not in self.features:
            self.error(f"{what} requires the {feature!r} feature")

    # grammar
    def parse(self) -> Term:
        term = self.comp()
        if self.peek()[0] != "eof":
            self.error(f"unexpected {self.peek()[1]!r}")
        return term

    def comp(self) -> Term:
        parts = [self.dotseq()]
        while self.at(";"):
            self.next()
            parts.append(self.dotseq())
        acc = NIL
        for items in reversed(parts):
            acc = self.fold(items, acc)
        return acc

    def dotseq(self) -> list:
        items = [self.item()]
        while self.at("."):
            self.next()
            items.append(self.item())
        return items

    @staticmethod
    def fold(items: list, after: Term) -> Term:
        """Fold one dot-sequence onto the term that follows it after ``;``.

        Pops capture later items of the same sequence but not ``after``;
        a definition ``(x = N)`` binds everything to its right, ``after``
        included.
        """
        lets = [k for k, (kind, _) in enumerate(items) if kind == "let"]
        if lets:
            k = lets[0]
            name, bound = items[k][1]
            tail = Term((Push(bound, MAIN), Pop(MAIN, name)) + _Parser.fold(items[k + 1:], after).actions)
            items = items[:k]
        else:
            tail = None
        term = NIL if tail is None else tail
        for kind, payload in reversed(items):
            if kind == "action":
                term = Term((payload,) + term.actions)
            else:
                term = compose(payload, term)
        return term if tail is not None else compose(term, after)

    def location(self) -> str:
        kind, val, pos = self.peek()
        if kind == "sym" and val in ("~", "λ"):
            self.next()
            return MAIN
        if kind == "ident" and val != WILDCARD:
            self.next()
            return val
        return MAIN

    def binder(self) -> str:
        kind, val, pos = self.next()
        if kind != "ident":
            raise ParseError("expected a binder name", pos, self.text)
        if val in SUGAR or val in CONST_WORDS or val in PRIM_WORDS:
            raise ParseError(f"reserved word {val!r} cannot be bound", pos, self.text)
        return val

    def thunk(self) -> Thunk:
        self.need("thunks", "thunk")
        self.expect("!{")
        body = self.comp()
        self.expect("}")
        return Thunk(body)

    def item(self):
        kind, val, pos = self.peek()
        if kind == "sym":
            if val == "*":
                self.next()
                return ("group", NIL)
            if val == "(":
                self.next()
                if self.peek()[0] == "ident" and self.at("=", 1):
                    name = self.binder()
                    self.expect("=")
                    bound = self.comp()
                    self.expect(")")
                    return ("let", (name, bound))
                inner = self.comp()
                self.expect(")")
                return ("group", inner)
            if val == "[":
                self.next()
                if self.at("!{") and self._thunk_only():
                    arg = self.thunk()
                else:
                    arg = self.comp()
                self.expect("]")
                return ("action", Push(arg, self.location()))
            if val == "<":
                return ("action", self.pop(MAIN))
            if val in ("~", "λ") and self.at("<", 1):
                self.next()
                return ("action", self.pop(MAIN))
            if val == "?":
                self.need("thunks", "force")
                self.next()
                if self.at("!{"):
                    return ("action", Force(self.thunk()))
                return ("action", Force(self.binder()))
            if val in ("+", "-", "×"):
                self.need("consts", f"operator {val!r}")
                self.next()
                return ("action", Prim("mul" if val == "×" else val))
            self.error(f"unexpected {val!r}")
        if kind == "int":
            self.need("consts", "integer literal")
            self.next()
            return ("action", Lit(int(val)))
        if kind == "ident":
            if self.at("<", 1):
                self.next()
                return ("action", self.pop(val))
            if val == WILDCARD:
                self.error("'_' can only be used as a binder")
            if val in SUGAR:
                return ("group", self.sugar())
            if val in CONST_WORDS:
                self.need("consts", f"constant {val!r}")
                self.next()
                return ("action", Lit(CONST_WORDS[val]))
            if val in PRIM_WORDS:
                self.need("consts", f"operator {val!r}")
                self.next()
                return ("action", Prim(PRIM_WORDS[val]))
            self.next()
            return ("action", Var(val))
        self.error("unexpected end of input" if kind == "eof" else f"unexpected {val!r}")

    def _thunk_only(self) -> bool:
        # `[!{M}]` pushes a thunk; `[!{M}.N]` is not allowed
        depth = 0
        k = self.i
        while k < len(self.tokens):
            kind, val, _ = self.tokens[k]
            if val in ("!{", "{", "[", "("):
                depth += 1
            elif val in ("}", "]", ")"):
                depth -= 1
                if depth == 0:
                    return self.tokens[k + 1][1] == "]"
            k += 1
        return False

    def pop(self, location: str) -> Pop:
        self.expect("<")
        name = self.binder()
        self.expect(">")
        return Pop(location, name)

    def sugar(self) -> Term:
        _, word, pos = self.next()
        if word in ("get", "set"):
            kind, cell, _ = self.next()
            if kind != "ident":
                raise ParseError(f"'{word}' needs a location", pos, self.text)
            return get_op(cell) if word == "get" else set_op(cell)
        return {"print": print_op, "read": read_op, "rand": rand_op}[word]()


def parse(text: str, features: Iterable[str] = ()) -> Term:
    """Parse concrete syntax into a term.

    >>> print(parse("<x>.[x].[x]"))
    <x>.[x].[x]
    """
    return _Parser(text, features).parse()


# Programming sugar ------------------------------------------------------------


def print_op() -> Term:
    return parse("<x>.[x]out")


def read_op() -> Term:
    return parse("in<x>.[x]")


def rand_op() -> Term:
    return parse("rnd<x>.[x]")


def get_op(cell: str) -> Term:
    return Term((Pop(cell, "x"), Push(var("x"), cell), Push(var("x"), MAIN)))


def set_op(cell: str) -> Term:
    return Term((Pop(MAIN, "x"), Pop(cell, WILDCARD), Push(var("x"), cell)))


def let(name: str, bound: Term, body: Term) -> Term:
    """``(x=N);M``, which is the redex ``[N].<x>.M``."""
    return Term((Push(bound, MAIN), Pop(MAIN, name)) + body.actions)
