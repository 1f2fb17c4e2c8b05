import pytest
from hypothesis import given, settings, strategies as st

from fmc.checks import typed_closed_terms
from fmc.enumerate import arrow_types, closed_terms
from fmc.machine import run
from fmc.reduction import one_step_reducts
from fmc.syntax import MAIN, parse
from fmc.types import (
    B, Z, SearchBudgetExceeded, TypeCheckFailure, TypeSyntaxError, UnboundVariable,
    bottom, bottom_memory, check, expand, has_type, parse_type, print_type, run_set_member,
    solve_type, type_compose, type_eq,
)

C = ("consts",)
T = parse_type


@pytest.mark.parametrize("text", [
    "Z > Z Z", "Z B >", ">", "(>) > (>) (>)", "c(Z) rnd(Z Z) > c(Z) out(Z)",
    "(Z > B) a(Z) > a(B)",
])
def test_type_print_parse_round_trip(text):
    assert print_type(T(text)) == text
    assert type_eq(T(print_type(T(text))), T(text))


def test_o_abbreviates_the_empty_arrow():
    assert type_eq(T("o"), T(">"))
    assert type_eq(T("o > o o"), T("(>) > (>) (>)"))


def test_singletons_on_different_locations_permute():
    assert type_eq(T("rnd(Z Z) c(Z) > c(Z) out(Z)"), T("c(Z) rnd(Z Z) > out(Z) c(Z)"))


def test_type_syntax_errors():
    with pytest.raises(TypeSyntaxError):
        T("Z > (Z")
    with pytest.raises(TypeSyntaxError):
        T("a(Z > Z")
    with pytest.raises(TypeSyntaxError):
        T("Z > Z > Z")


def test_other_base_names_act_as_opaque_types():
    assert has_type({}, parse("<x>.<y>.[y].[x]"), T("t s > s t"))
    assert not has_type({}, parse("<x>.<y>.[y].[x]"), T("t s > t s"))


def test_stack_shuffles():
    assert has_type({}, parse("<x>.[x].[x]"), T("Z > Z Z"))
    assert has_type({}, parse("<x>.<y>"), T("Z B >"))
    assert has_type({}, parse("<x>.<y>.[y].[x]"), T("Z B > B Z"))
    assert has_type({}, parse("<x>.<y>.[x].[y]"), T("Z B > Z B"))
    assert not has_type({}, parse("<x>.<y>.[x].[y]"), T("Z B > B Z"))


def test_variable_rule_uses_context():
    ctx = {"f": T("Z > B")}
    assert has_type(ctx, parse("f"), T("Z > B"))
    assert has_type(ctx, parse("[y].f", C), T("> B")) is False
    assert has_type({"f": T("Z > B"), "y": T("> Z")}, parse("y.f"), T("> B"))
    with pytest.raises(UnboundVariable):
        check({}, parse("f"), T("Z > B"))


def test_constants_and_primitives():
    assert has_type({}, parse("[4].[3].[2].+.×.[1].+", C), T("> Z"))
    assert has_type({}, parse("+", C), T("Z Z > Z"))
    assert has_type({}, parse("[true]", C), T("> B"))
    assert not has_type({}, parse("[true].[1].+", C), T("> Z"))


def test_effect_operations():
    assert has_type({}, parse("rand", C), T("rnd(Z) > Z"))
    assert has_type({}, parse("print", C), T("Z > out(Z)"))
    assert has_type({}, parse("set c", C), T("Z c(Z) > c(Z)"))
    assert has_type({}, parse("get c", C), T("c(Z) > c(Z) Z"))


def test_derivation_lists_rules():
    d = check({}, parse("<x>.[x].[x]"), T("o > o o"))
    lines = d.lines()
    assert lines[0].startswith("Tλ: <x>.[x].[x]")
    assert any(line.lstrip().startswith("T*") for line in lines)


def test_solve_type_finds_smallest_type():
    assert print_type(solve_type(parse("<x>.<y>"))) == "(>) (>) >"
    assert print_type(solve_type(parse("<x>.[x].x"))) == "(>) > (>)"
    assert solve_type(parse("[<y>.y].<x>.[x].x")) is None


def test_budget_exhaustion_is_reported():
    with pytest.raises(SearchBudgetExceeded):
        check({}, parse("<x>.[x].x.x.x"), T("(> Z) > (> Z) Z Z"), budget=3)
    assert issubclass(SearchBudgetExceeded, TypeCheckFailure)


def test_composition_of_types():
    assert type_eq(type_compose(T("Z >"), T("B > B")), T("Z B > B"))
    assert type_eq(type_compose(T("> Z"), T("Z Z > B")), T("Z > B"))
    f = T("rnd(Z) c(Z) > c(Z) Z")
    assert type_eq(type_compose(f, f), T("rnd(Z Z) c(Z) > c(Z) Z Z"))


def test_composed_terms_have_composed_types():
    m, n = parse("rand; set c", C), parse("get c", C)
    tm, tn = T("rnd(Z) c(Z) > c(Z)"), T("c(Z) > c(Z) Z")
    assert has_type({}, m, tm) and has_type({}, n, tn)
    assert has_type({}, parse("rand; set c; get c", C), type_compose(tm, tn))


def test_expansion_preserves_typing():
    t = T("Z > Z Z")
    assert has_type({}, parse("<x>.[x].[x]"), expand(t, {MAIN: (B,), "a": (Z,)}))


def test_bottom_inhabits_its_type():
    for text in ["Z > Z", "Z (Z > B) > Z", "a(Z) > B", "o > o o", "rnd(Z Z) > out(B)"]:
        t = T(text)
        assert has_type({}, bottom(t), t), text


def test_bottom_runs_on_bottom_memory():
    t = T("Z a(B) > B a(Z)")
    trace = run(bottom_memory(t), bottom(t))
    assert trace.halted
    assert len(trace.final.memory.stack(MAIN)) == 1
    assert len(trace.final.memory.stack("a")) == 1


def test_run_set_membership():
    assert run_set_member(parse("<x>.[x].[x]"), T("Z > Z Z"))
    assert not run_set_member(parse("<x>.[x]"), T("Z > Z Z"))


def test_self_application_of_self_application_fails():
    term = parse("[<y>.[y].y].<x>.[x].x")
    goals = arrow_types(4, bases=(Z,), max_size=4)
    assert len(goals) > 100
    assert not any(has_type({}, term, g) for g in goals)


def test_every_small_closed_term_is_typable():
    terms = list(closed_terms(6))
    assert sum(1 for _ in typed_closed_terms(6)) == len(terms)


@given(st.integers(min_value=0, max_value=6634))
@settings(max_examples=100, deadline=None)
def test_subject_reduction_on_enumerated_terms(index):
    term = list(closed_terms(7))[index]
    t = solve_type(term)
    assert t is not None
    for reduct in one_step_reducts(term):
        assert has_type({}, reduct, t)


@given(st.integers(min_value=0, max_value=6634))
@settings(max_examples=100, deadline=None)
def test_typed_terms_halt_on_bottom_memory(index):
    term = list(closed_terms(7))[index]
    t = solve_type(term)
    trace = run(bottom_memory(t), term, fuel=10_000, record=False)
    assert trace.halted
    for loc, vec in t.outputs:
        assert len(trace.final.memory.stack(loc)) == len(vec)
