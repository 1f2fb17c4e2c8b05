"""Property checks shared by the test-suite and the ``selftest`` command.

Each check returns a small report instead of asserting, so the same code can
drive pytest, the acceptance script and the CLI.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from . import encodings as src
from .encodings import encode_arrow, encode_cbn, encode_cbv
from .enumerate import (
    closed_terms, random_arrow, random_computation, random_term, random_value, source_programs,
)
from .machine import (
    CHURCH_FALSE, CHURCH_TRUE, FixedList, Halted, Memory, Stuck, run, run_composed_check,
)
from .oracles import Closure, OracleFuel, OracleStuck, World, eval_cbn, eval_cbv, subst
from .reduction import (
    FuelExhausted, Strategy, beta_perm_equivalent, beta_step, find_redexes, joinable,
    normalize, one_step_reducts, parallel_diamond_check, perm_eq, reachable, reduces_to,
    spine_diamond_check,
)
from .syntax import MAIN, Lit, Term, alpha_eq, alpha_key, parse, substitute
from .types import (
    SearchBudgetExceeded, bottom, bottom_memory, has_type, solve_type,
)


@dataclass
class Report:
    name: str
    checked: int = 0
    skipped: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.checked > 0

    def fail(self, detail) -> None:
        self.failures.append(detail)

    def summary(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f", {self.skipped} skipped" if self.skipped else ""
        first = f"; first failure: {self.failures[0]}" if self.failures else ""
        return f"{status} {self.name}: {self.checked} checked{extra}, {len(self.failures)} failed{first}"


# ---------------------------------------------------------------------------
# Confluence


def confluence_report(max_size: int = 6, depth: int = 3, locs=(MAIN, "a")) -> Report:
    """Every peak of at most ``depth`` steps on each side is joinable."""
    rep = Report(f"confluence of closed terms to size {max_size}")
    for term in closed_terms(max_size, locs):
        if not find_redexes(term):
            continue
        rep.checked += 1
        if not _peaks_join(term, depth):
            rep.fail(str(term))
    return rep


def _peaks_join(term: Term, depth: int) -> bool:
    reducts = list(reachable(term, depth).values())
    try:
        normal = {alpha_key(normalize(r, Strategy.LO, fuel=200)) for r in reducts}
        return len(normal) == 1
    except FuelExhausted:
        pass
    for a, b in itertools.combinations(reducts, 2):
        if not joinable(a, b, depth + 2):
            return False
    return True


def spine_report(max_size: int = 6, locs=(MAIN, "a")) -> Report:
    rep = Report(f"spine diamond to size {max_size}")
    for term in closed_terms(max_size, locs):
        if len(find_redexes(term, Strategy.SPINE)) < 2:
            continue
        rep.checked += 1
        if not spine_diamond_check(term):
            rep.fail(str(term))
    return rep


def parallel_report(instances: int = 10_000, seed: int = 42, size: int = 12) -> Report:
    """Random disjoint pairs of redex sets satisfy (M_X)_O = M_XO = (M_O)_X."""
    rng = random.Random(seed)
    rep = Report(f"parallel reduction on {instances} marked instances")
    while rep.checked < instances:
        term = random_term(rng, rng.randint(4, size))
        sites = find_redexes(term)
        if not sites:
            continue
        rng.shuffle(sites)
        cut = rng.randint(0, len(sites))
        xs, os = sites[:cut], sites[cut:]
        rep.checked += 1
        if not parallel_diamond_check(term, xs, os):
            rep.fail(str(term))
    return rep


# ---------------------------------------------------------------------------
# Types


def typed_closed_terms(max_size: int, locs=(MAIN, "a"), budget: int = 20_000):
    """(term, type) pairs for closed terms to which the search assigns a type."""
    for term in closed_terms(max_size, locs):
        try:
            t = solve_type(term, budget=budget)
        except SearchBudgetExceeded:
            continue
        if t is not None:
            yield term, t


def termination_report(max_size: int = 8, fuel: int = 100_000, locs=(MAIN, "a")) -> Report:
    """Typed closed terms run to completion on bottom-filled input stacks."""
    rep = Report(f"typed termination to size {max_size}")
    for term, t in typed_closed_terms(max_size, locs):
        rep.checked += 1
        trace = run(bottom_memory(t), term, fuel, record=False)
        out = trace.outcome
        if not isinstance(out, Halted) or out.term.actions:
            rep.fail(f"{term} : {t} -> {type(out).__name__}")
            continue
        outs = dict(t.outputs)
        for loc in set(out.memory.stacks) | set(outs):
            if len(out.memory.stack(loc)) != len(outs.get(loc, ())):
                rep.fail(f"{term} : {t} leaves the wrong number of values on {loc}")
                break
    return rep


def subject_reduction_report(instances: int = 5_000, seed: int = 7, max_size: int = 14) -> Report:
    """Each beta step of a typed random term preserves the type found for it."""
    rng = random.Random(seed)
    rep = Report(f"subject reduction on {instances} typed terms")
    attempts = 0
    while rep.checked < instances and attempts < 200 * instances:
        attempts += 1
        term = random_term(rng, rng.randint(3, max_size))
        if not find_redexes(term):
            continue
        try:
            t = solve_type(term, budget=20_000)
        except SearchBudgetExceeded:
            continue
        if t is None:
            continue
        rep.checked += 1
        for reduct in one_step_reducts(term):
            try:
                ok = has_type({}, reduct, t, budget=200_000)
            except SearchBudgetExceeded:
                rep.skipped += 1
                continue
            if not ok:
                rep.fail(f"{term} : {t} but {reduct} does not")
    return rep


# ---------------------------------------------------------------------------
# Run composition


def run_composition_report(terms: int = 1_000, seed: int = 3, max_size: int = 14) -> Report:
    """Halting runs of M and of N glue to a halting run of M;N at every split point."""
    rng = random.Random(seed)
    rep = Report(f"run composition on {terms} halting closed terms")
    found = 0
    attempts = 0
    while found < terms and attempts < 200 * terms:
        attempts += 1
        term = random_term(rng, rng.randint(2, max_size))
        mem = _random_memory(rng)
        whole = run(mem, term, 10_000, record=False)
        if not (whole.halted and not whole.outcome.term.actions):
            continue
        found += 1
        for k in range(len(term.actions) + 1):
            m, n = Term(term.actions[:k]), Term(term.actions[k:])
            if n.fv:
                continue
            try:
                ok = run_composed_check(mem, m, n, 10_000)
            except ValueError:
                rep.skipped += 1
                continue
            rep.checked += 1
            if not ok:
                rep.fail(f"{m} ; {n}")
    return rep


def _random_memory(rng: random.Random) -> Memory:
    items = [parse("*"), parse("<x>.[x]"), parse("[*]"), parse("a<x>.*")]
    return Memory({
        MAIN: tuple(rng.choice(items) for _ in range(rng.randint(0, 3))),
        "a": tuple(rng.choice(items) for _ in range(rng.randint(0, 2))),
    })


# ---------------------------------------------------------------------------
# Adequacy of the encodings


INPUT = (5, 6)
RND_BITS = (True, False, True, True, False)


def _world(prog, initial) -> World:
    cells = src.cells(prog) | {"a"}
    return World(store={c: initial for c in cells}, input=[src.Int(i) for i in INPUT],
                 choices={"rnd": list(RND_BITS)})


def _machine_memory(prog) -> Memory:
    cells = src.cells(prog) | {"a"}
    stacks = {c: (Term((Lit(0),)),) for c in cells}
    suppliers = {
        "in": FixedList(tuple(Term((Lit(i),)) for i in INPUT)),
        "rnd": FixedList(tuple(CHURCH_TRUE if b else CHURCH_FALSE for b in RND_BITS)),
    }
    return Memory(stacks, suppliers)


def _same_stack(actual: tuple, expected: list) -> bool:
    return len(actual) == len(expected) and all(alpha_eq(a, e) for a, e in zip(actual, expected))


def _supply_used(mem: Memory, loc: str) -> int:
    return mem.suppliers[loc].consumed


def cbn_case(prog) -> str:
    """'agree', 'skip' (oracle undefined) or a description of the disagreement."""
    world = _world(prog, src.Int(0))
    try:
        head, args = eval_cbn(prog, world)
    except (OracleStuck, OracleFuel):
        return "skip"
    trace = run(_machine_memory(prog), encode_cbn(prog), 100_000, record=False)
    out = trace.outcome
    expected_main = [encode_cbn(a) for a in args]
    if isinstance(head, src.Lam):
        if not (isinstance(out, Stuck) and out.reason == "empty-stack"):
            return f"expected to stop at an abstraction, got {type(out).__name__}"
        term, mem = out.state.term, out.state.memory
    elif isinstance(head, src.Int):
        if not isinstance(out, Halted):
            return f"expected to halt at {head.value}, got {type(out).__name__}"
        term, mem = out.term, out.memory
    else:
        return "skip"
    if not alpha_eq(term, encode_cbn(head)):
        return f"final term {term}, oracle {encode_cbn(head)}"
    if not _same_stack(mem.stack(MAIN), expected_main):
        return "main stack differs"
    for c, v in world.store.items():
        if not _same_stack(mem.stack(c), [encode_cbn(v)]):
            return f"cell {c} differs"
    if not _same_stack(mem.stack("out"), [encode_cbn(o) for o in world.output]):
        return "output differs"
    if _supply_used(mem, "in") != len(INPUT) - len(world.input):
        return "input consumption differs"
    if _supply_used(mem, "rnd") != len(RND_BITS) - len(world.choices["rnd"]):
        return "random draws differ"
    return "agree"


def cbv_value_term(v) -> Term:
    if isinstance(v, int):
        return Term((Lit(v),))
    lam = encode_cbv(src.Lam(v.name, v.body)).actions[0].arg
    for name, value in v.env:
        if name in lam.fv:
            lam = substitute(cbv_value_term(value), name, lam)
    return lam


def cbv_case(prog) -> str:
    world = _world(prog, 0)
    try:
        value = eval_cbv(prog, world)
    except (OracleStuck, OracleFuel):
        return "skip"
    trace = run(_machine_memory(prog), encode_cbv(prog), 100_000, record=False)
    out = trace.outcome
    if not isinstance(out, Halted) or out.term.actions:
        return f"expected to halt, got {type(out).__name__}"
    mem = out.memory
    if not _same_stack(mem.stack(MAIN), [cbv_value_term(value)]):
        return f"result {mem.stack(MAIN)}, oracle {cbv_value_term(value)}"
    for c, v in world.store.items():
        if not _same_stack(mem.stack(c), [cbv_value_term(v)]):
            return f"cell {c} differs"
    if not _same_stack(mem.stack("out"), [cbv_value_term(o) for o in world.output]):
        return "output differs"
    if _supply_used(mem, "in") != len(INPUT) - len(world.input):
        return "input consumption differs"
    if _supply_used(mem, "rnd") != len(RND_BITS) - len(world.choices["rnd"]):
        return "random draws differ"
    return "agree"


def adequacy_report(mode: str, max_size: int = 6) -> Report:
    case = {"cbn": cbn_case, "cbv": cbv_case}[mode]
    rep = Report(f"{mode} adequacy to size {max_size}")
    for prog in source_programs(max_size):
        verdict = case(prog)
        if verdict == "skip":
            rep.skipped += 1
            continue
        rep.checked += 1
        if verdict != "agree":
            rep.fail(f"{src.print_source(prog)}: {verdict}")
    return rep


# ---------------------------------------------------------------------------
# Monad and Arrow laws


def monad_law_instances(rng: random.Random, n: int):
    """(law, lhs, rhs) triples of encoded metalanguage terms."""
    laws = ("left unit", "right unit", "associativity")
    for k in range(n):
        law = laws[k % 3]
        if law == "left unit":
            v = random_value(rng, [])
            body = random_computation(rng, ["p"], depth=3)
            yield law, encode_cbn(src.Let("p", src.Return(v), body)), encode_cbn(subst(body, "p", v))
        elif law == "right unit":
            m = random_computation(rng, [], depth=3)
            yield law, encode_cbn(src.Let("p", m, src.Return(src.Var("p")))), encode_cbn(m)
        else:
            l_ = random_computation(rng, [], depth=2)
            m = random_computation(rng, ["p"], depth=2)
            n_ = random_computation(rng, ["q"], depth=2)
            lhs = src.Let("q", src.Let("p", l_, m), n_)
            rhs = src.Let("p", l_, src.Let("q", m, n_))
            yield law, encode_cbn(lhs), encode_cbn(rhs)


def arrow_law_instances(rng: random.Random, n: int):
    ident = src.Arr(src.Lam("y", src.Var("y")))
    laws = ("left identity", "right identity", "associativity")
    for k in range(n):
        law = laws[k % 3]
        p = random_arrow(rng)
        if law == "left identity":
            yield law, encode_arrow(src.ArrCompose(ident, p)), encode_arrow(p)
        elif law == "right identity":
            yield law, encode_arrow(src.ArrCompose(p, ident)), encode_arrow(p)
        else:
            q, r = random_arrow(rng), random_arrow(rng)
            lhs = src.ArrCompose(src.ArrCompose(p, q), r)
            rhs = src.ArrCompose(p, src.ArrCompose(q, r))
            yield law, encode_arrow(lhs), encode_arrow(rhs)


def law_report(kind: str, instances: int = 1_000, seed: int = 11) -> Report:
    gen = {"monad": monad_law_instances, "arrow": arrow_law_instances}[kind]
    rep = Report(f"{kind} laws on {instances} instances")
    for law, lhs, rhs in gen(random.Random(seed), instances):
        rep.checked += 1
        if not beta_perm_equivalent(lhs, rhs, fuel=2_000):
            rep.fail(f"{law}: {lhs}  vs  {rhs}")
    return rep


# ---------------------------------------------------------------------------
# Algebraic laws of state


def update(loc: str, value: str, body: str) -> str:
    return f"{loc}<_>.[{value}]{loc}.{body}"


def lookup(loc: str, name: str, body: str) -> str:
    return f"{loc}<{name}>.[{name}]{loc}.{body}"


BODIES_XY = ("x.y", "[x]b.[y].m", "[y].[x].m.x")
BODIES_X = ("x", "[x]c.x.k", "[x].m")
VALUES = ("v", "*", "<z>.z", "[w]c")


@dataclass
class LawCheck:
    law: int
    lhs: Term
    rhs: Term
    ok: bool
    how: str


def state_law_checks() -> list:
    """Mechanical checks of the seven laws, over several instantiations."""
    p = parse
    out = []
    # 1: lookup then writing back the same value is a no-op (beta, then eta)
    lhs = p(lookup("a", "y", update("a", "y", "x")))
    mid = p(lookup("a", "y", "x"))
    out.append(LawCheck(1, lhs, p("x"), reduces_to(lhs, mid) and reduces_to(mid, p("x"), eta=True),
                        "beta then eta"))
    for body in BODIES_XY:
        # 2: two lookups read the same value
        lhs = p(lookup("a", "y", lookup("a", "x", body)))
        rhs = p(lookup("a", "y", str(substitute(p("y"), "x", p(body)))))
        out.append(LawCheck(2, lhs, rhs, reduces_to(lhs, rhs), "beta"))
        # 5: lookups on distinct cells commute
        lhs = p(lookup("a", "x", lookup("b", "y", body)))
        rhs = p(lookup("b", "y", lookup("a", "x", body)))
        out.append(LawCheck(5, lhs, rhs, perm_eq(lhs, rhs), "permutation"))
    for v, v2 in itertools.product(VALUES, repeat=2):
        # 3: the second update wins
        lhs = p(update("a", v, update("a", v2, "x")))
        rhs = p(update("a", v2, "x"))
        out.append(LawCheck(3, lhs, rhs, reduces_to(lhs, rhs), "beta"))
        # 6: updates of distinct cells commute
        lhs = p(update("a", v, update("b", v2, "x")))
        rhs = p(update("b", v2, update("a", v, "x")))
        out.append(LawCheck(6, lhs, rhs, perm_eq(lhs, rhs), "permutation"))
    for v in VALUES:
        for body in BODIES_X:
            # 4: a lookup right after an update sees the value
            lhs = p(update("a", v, lookup("a", "x", body)))
            rhs = p(update("a", v, str(substitute(p(v), "x", p(body)))))
            out.append(LawCheck(4, lhs, rhs, reduces_to(lhs, rhs), "beta"))
            # 7: update and lookup on distinct cells commute, provided x is not free in v
            if "x" in p(v).fv:
                continue
            lhs = p(update("a", v, lookup("b", "x", body)))
            rhs = p(lookup("b", "x", update("a", v, body)))
            out.append(LawCheck(7, lhs, rhs, perm_eq(lhs, rhs), "permutation"))
    return out


def state_law_side_condition_needed() -> bool:
    """Law 7 must fail to permute when the looked-up variable occurs in the value."""
    lhs = parse(update("a", "x", lookup("b", "x", "x")))
    rhs = parse(lookup("b", "x", update("a", "x", "x")))
    return not perm_eq(lhs, rhs)


def state_law_report() -> Report:
    rep = Report("algebraic laws of state")
    checks = state_law_checks()
    for c in checks:
        rep.checked += 1
        if not c.ok:
            rep.fail(f"law {c.law}: {c.lhs} vs {c.rhs}")
    if {c.law for c in checks} != set(range(1, 8)):
        rep.fail("not every law was instantiated")
    if not state_law_side_condition_needed():
        rep.fail("law 7 permutes even when x is free in v")
    return rep


# ---------------------------------------------------------------------------
# Typing goldens that are cheap enough for selftest


def bottom_report(max_depth: int = 3, max_size: int = 6) -> Report:
    from .enumerate import arrow_types
    from .types import Z, check, TypeCheckFailure

    rep = Report(f"bottom inhabitants to depth {max_depth}")
    for t in arrow_types(max_depth, locs=(MAIN, "a"), bases=(Z,), max_size=max_size):
        rep.checked += 1
        try:
            check({}, bottom(t), t)
        except TypeCheckFailure as e:
            rep.fail(f"{t}: {e}")
    return rep
