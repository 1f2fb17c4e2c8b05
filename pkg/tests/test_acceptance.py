"""Acceptance criteria 1 to 11, one test each.

Every test prints one ``PASS`` or ``FAIL`` line; the lines are repeated in
the pytest terminal summary.  Run ``python tests/test_acceptance.py`` to get
just those lines.  Term comparisons are exact up to alpha-equivalence, and
up to permutation (~) where a criterion says so.
"""

import sys
import time

from fmc.checks import (
    adequacy_report, bottom_report, confluence_report, law_report, parallel_report,
    run_composition_report, spine_report, state_law_checks, state_law_report,
    subject_reduction_report, termination_report,
)
from fmc.encodings import desugar, encode, parse_source
from fmc.enumerate import arrow_types
from fmc.machine import memory, run
from fmc.reduction import Strategy, normalize, perm_eq, reduction_sequence
from fmc.syntax import MAIN, alpha_eq, parse
from fmc.types import Z, check, has_type, parse_type

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

C = ("consts",)
LIMIT_SECONDS = 60


def report(number: int, title: str, ok: bool, detail: str, started: float) -> None:
    elapsed = time.perf_counter() - started
    if elapsed > LIMIT_SECONDS:
        ok, detail = False, f"{detail}; took {elapsed:.1f}s, over the {LIMIT_SECONDS}s budget"
    line = f"{'PASS' if ok else 'FAIL'} [{number:2d}] {title}: {detail} ({elapsed:.1f}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def term(text: str):
    return parse(text, C)


def same_row(state, stacks: dict, text: str) -> bool:
    """A machine state equals a table row: every listed stack, and the term, up to alpha."""
    mem = state.memory
    for loc, items in stacks.items():
        got = mem.stack(loc)
        want = tuple(term(i) for i in items)
        if len(got) != len(want) or not all(alpha_eq(g, w) for g, w in zip(got, want)):
            return False
    for loc in mem.stacks:
        if loc not in stacks and mem.stack(loc):
            return False
    return alpha_eq(state.term, term(text))


def table_matches(trace, rows) -> tuple:
    states = trace.states()
    if len(states) != len(rows):
        return False, f"{len(states)} states, expected {len(rows)}"
    for k, (state, (stacks, text)) in enumerate(zip(states, rows)):
        if not same_row(state, stacks, text):
            return False, f"row {k + 1} differs: {state.term}"
    return True, f"{len(rows)} states match"


# ---------------------------------------------------------------------------
# 1. Golden machine trace of the call-by-name state example

STATE_SOURCE = "a := 2; ((\\x. !a) (a := 3; 0))"
STATE_ROWS = [
    ({"a": ["0"], MAIN: []}, "a<_>.[2]a.[a<_>.[3]a.0].<x>.a<y>.[y]a.y"),
    ({"a": [], MAIN: []}, "[2]a.[a<_>.[3]a.0].<x>.a<y>.[y]a.y"),
    ({"a": ["2"], MAIN: []}, "[a<_>.[3]a.0].<x>.a<y>.[y]a.y"),
    ({"a": ["2"], MAIN: ["a<_>.[3]a.0"]}, "<x>.a<y>.[y]a.y"),
    ({"a": ["2"], MAIN: []}, "a<y>.[y]a.y"),
    ({"a": [], MAIN: []}, "[2]a.2"),
    ({"a": ["2"], MAIN: []}, "2"),
]


def test_criterion_01_state_example_trace():
    started = time.perf_counter()
    encoded = encode(parse_source(STATE_SOURCE), "cbn")
    trace = run(memory({"a": ["0"]}, features=C), encoded)
    ok, detail = table_matches(trace, STATE_ROWS)
    final = trace.final
    ok = ok and trace.halted and final.memory.stack("a") == (term("2"),) and final.term == term("2")
    report(1, "machine trace of the state example", ok, f"{detail}; a = ε·2, result 2", started)


# ---------------------------------------------------------------------------
# 2. Golden leftmost-outermost reduction of the same term

STATE_REDUCTION = [
    "a<_>.[2]a.[a<_>.[3]a.0].<x>.a<y>.[y]a.y",
    "a<_>.[a<_>.[3]a.0].<x>.[2]a.2",
    "a<_>.[2]a.2",
]


def test_criterion_02_state_example_reduction():
    started = time.perf_counter()
    encoded = encode(parse_source(STATE_SOURCE), "cbn")
    steps = reduction_sequence(encoded, Strategy.LO)
    seq = [encoded] + [s.after for s in steps]
    ok = len(steps) == 2 and all(alpha_eq(t, term(w)) for t, w in zip(seq, STATE_REDUCTION))
    ok = ok and perm_eq(seq[-1], desugar("a<_>.[2]a; 2"))
    report(2, "leftmost-outermost reduction of the state example", ok,
           f"{len(steps)} steps, ends ~ a := 2 ; 2", started)


# ---------------------------------------------------------------------------
# 3. Golden end-to-end run: reduction then machine evaluation

DRAW_TWICE_TERM = "(f = rand; set c; get c); f; f; +; print"
DRAW_TWICE_REDUCTION = [
    "[rnd<x>.[x].<y>.c<_>.[y]c.c<z>.[z]c.[z]].<f>.f.f.+.<p>.[p]out",
    "[rnd<x>.c<_>.[x]c.c<z>.[z]c.[z]].<f>.f.f.+.<p>.[p]out",
    "[rnd<x>.c<_>.[x]c.[x]].<f>.f.f.+.<p>.[p]out",
    "rnd<x>.c<_>.[x]c.[x].rnd<y>.c<_>.[y]c.[y].+.<p>.[p]out",
    "rnd<x>.c<_>.[x].rnd<y>.[y]c.[y].+.<p>.[p]out",
]
DRAW_TWICE_ROWS = [
    ({"out": [], "rnd": ["6", "7"], "c": ["*"], MAIN: []}, DRAW_TWICE_REDUCTION[-1]),
    ({"out": [], "rnd": ["6"], "c": ["*"], MAIN: []}, "c<_>.[7].rnd<y>.[y]c.[y].+.<p>.[p]out"),
    ({"out": [], "rnd": ["6"], "c": [], MAIN: []}, "[7].rnd<y>.[y]c.[y].+.<p>.[p]out"),
    ({"out": [], "rnd": ["6"], "c": [], MAIN: ["7"]}, "rnd<y>.[y]c.[y].+.<p>.[p]out"),
    ({"out": [], "rnd": [], "c": [], MAIN: ["7"]}, "[6]c.[6].+.<p>.[p]out"),
    ({"out": [], "rnd": [], "c": ["6"], MAIN: ["7"]}, "[6].+.<p>.[p]out"),
    ({"out": [], "rnd": [], "c": ["6"], MAIN: ["7", "6"]}, "+.<p>.[p]out"),
    ({"out": [], "rnd": [], "c": ["6"], MAIN: ["13"]}, "<p>.[p]out"),
    ({"out": [], "rnd": [], "c": ["6"], MAIN: []}, "[13]out"),
    ({"out": ["13"], "rnd": [], "c": ["6"], MAIN: []}, "*"),
]


def test_criterion_03_draw_twice_reduction_and_run():
    started = time.perf_counter()
    start = desugar(DRAW_TWICE_TERM)
    steps = reduction_sequence(start, Strategy.LI)
    seq = [start] + [s.after for s in steps]
    reduction_ok = len(steps) == 4 and all(
        alpha_eq(t, term(w)) for t, w in zip(seq, DRAW_TWICE_REDUCTION))
    trace = run(memory({"rnd": ["6", "7"], "c": ["*"]}, features=C), seq[-1])
    table_ok, detail = table_matches(trace, DRAW_TWICE_ROWS)
    mem = trace.final.memory
    final_ok = trace.halted and mem.stack("out") == (term("13"),) and mem.stack("c") == (term("6"),)
    report(3, "reduction and machine run of the random/state/output example",
           reduction_ok and table_ok and final_ok,
           f"{len(steps)} beta steps; {detail}; out = ε·13, c = ε·6", started)


# ---------------------------------------------------------------------------
# 4. Call-by-value goldens


def test_criterion_04_call_by_value_goldens():
    started = time.perf_counter()
    results = []
    cbv_state = normalize(encode(parse_source(STATE_SOURCE), "cbv"), Strategy.FULL)
    results.append(alpha_eq(cbv_state, term("a<_>.[3]a.[3]")))
    lifted = normalize(encode(parse_source("a := (\\x. b := 1; x) 0; !b"), "cbv"), Strategy.FULL)
    results.append(alpha_eq(lifted, term("b<_>.a<_>.[0]a.[1]b.[1]")))
    results.append(perm_eq(lifted, desugar("a<_>.[0]a; b<_>.[1]b; [1]")))
    left_to_right = desugar("c<_>.[2]c.c<x>.[x]c.c<_>.[3]c.[1].[x].[0].f")
    right_to_left = desugar("c<_>.[3]c.c<x>.[x]c.c<_>.[2]c.[1].[x].[0].f")
    results.append(alpha_eq(normalize(left_to_right), term("c<_>.[3]c.[1].[2].[0].f")))
    results.append(alpha_eq(normalize(right_to_left), term("c<_>.[2]c.[1].[3].[0].f")))
    report(4, "call-by-value goldens", all(results),
           f"{sum(results)}/{len(results)} normal forms as expected", started)


# ---------------------------------------------------------------------------
# 5. Algebraic laws of state


def test_criterion_05_state_laws():
    started = time.perf_counter()
    rep = state_law_report()
    laws = sorted({c.law for c in state_law_checks()})
    report(5, "algebraic laws of state", rep.ok,
           f"laws {laws[0]}-{laws[-1]}, {rep.checked} instances, {len(rep.failures)} failed; "
           "law 7 needs x not free in v", started)


# ---------------------------------------------------------------------------
# 6. Confluence


def test_criterion_06_confluence():
    started = time.perf_counter()
    peaks = confluence_report(max_size=6, depth=3)
    # the smallest terms with two spine redexes have size 7
    spine = spine_report(max_size=8)
    parallel = parallel_report(instances=10_000)
    ok = peaks.ok and spine.ok and parallel.ok
    report(6, "confluence", ok,
           f"{peaks.checked} reducible terms to size 6 joinable at depth 3; "
           f"{spine.checked} spine peaks to size 8 close in one step; "
           f"{parallel.checked} parallel marking instances", started)


# ---------------------------------------------------------------------------
# 7. Typing goldens

SHUFFLE_TYPES = [
    ("<x>.[x].[x]", "t > t t"),
    ("<x>.<y>", "t s >"),
    ("[<x>.[x]].<f>.f.f.f", "t > t"),
    ("<x>.<y>.[y].[x]", "t s > s t"),
    ("<x>.<y>.[x].[y]", "t s > t s"),
]
SELF_APPLICATION_DERIVATION = [
    "Tλ: <x>.[x].x : (> Z) > (> Z) Z",
    "  Ta: [x].x : > (> Z) Z",
    "    Tx: x : > Z",
    "      T*: * : Z > Z",
    "    Tx: x : (> Z) > (> Z) Z",
    "      T*: * : Z (> Z) > (> Z) Z",
]


def test_criterion_07_typing_goldens():
    started = time.perf_counter()
    shuffles = all(has_type({}, parse(m), parse_type(t)) for m, t in SHUFFLE_TYPES)
    self_app = term("<x>.[x].x")
    derivation = check({}, self_app, parse_type("(> Z) > (> Z) Z")).lines()
    self_app_ok = derivation == SELF_APPLICATION_DERIVATION and has_type(
        {}, self_app, parse_type("(>) > (>)"))
    omega = parse("[<y>.[y].y].<x>.[x].x")
    goals = arrow_types(4, bases=(Z,), max_size=4)
    omega_ok = not any(has_type({}, omega, g) for g in goals)
    bottoms = bottom_report(max_depth=3)
    ok = shuffles and self_app_ok and omega_ok and bottoms.ok
    report(7, "typing goldens", ok,
           f"stack shuffles {'ok' if shuffles else 'fail'}; self-application derivation "
           f"{'as expected' if self_app_ok else 'differs'}; (λx.xx)(λy.yy) rejected at "
           f"{len(goals)} goal types; bottom checks at {bottoms.checked} types", started)


# ---------------------------------------------------------------------------
# 8 to 11. Property suites at acceptance size


def test_criterion_08_typed_termination():
    started = time.perf_counter()
    rep = termination_report(max_size=8, fuel=100_000)
    report(8, "typed termination", rep.ok,
           f"{rep.checked} typed closed terms to size 8 halt, {len(rep.failures)} failures", started)


def test_criterion_09_subject_reduction():
    started = time.perf_counter()
    rep = subject_reduction_report(instances=5_000)
    report(9, "subject reduction", rep.ok and rep.checked >= 5_000,
           f"{rep.checked} typed terms re-check after each beta step, "
           f"{len(rep.failures)} failures", started)


def test_criterion_10_encoding_adequacy_and_laws():
    started = time.perf_counter()
    reps = [adequacy_report("cbn", 6), adequacy_report("cbv", 6),
            law_report("monad", 1_000), law_report("arrow", 1_000)]
    detail = "; ".join(f"{r.name}: {r.checked} agree" + (f", {len(r.failures)} fail" if r.failures else "")
                       for r in reps)
    report(10, "encoding adequacy and laws", all(r.ok for r in reps), detail, started)


def test_criterion_11_run_composition():
    started = time.perf_counter()
    rep = run_composition_report(terms=1_000)
    report(11, "run composition", rep.ok,
           f"{rep.checked} split points of 1000 halting terms, {len(rep.failures)} failures", started)


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
