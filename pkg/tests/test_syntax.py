import random

import pytest
from hypothesis import given, settings, strategies as st

from fmc.enumerate import closed_terms, count_closed_terms, random_term
from fmc.syntax import (
    MAIN, NIL, ParseError, Pop, Push, Term, Var, alpha_eq, alpha_key, compose, free_vars,
    locations, parse, substitute,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def rand_term(seed: int, size: int = 10, scope=()) -> Term:
    return random_term(random.Random(seed), size, scope=scope)


def test_parse_builds_action_sequence():
    t = parse("x.[y]a.b<z>")
    assert t.actions == (Var("x"), Push(parse("y"), "a"), Pop("b", "z"))


def test_main_location_aliases():
    assert parse("[x].<y>.y") == parse("[x]~.~<y>.y") == parse("[x]λ.λ<y>.y")


@pytest.mark.parametrize("text", [
    "*", "x", "<x>.[x].[x]", "a<_>.[2]a.[a<_>.[3]a.0].<x>.a<y>.[y]a.y",
    "[<x>.[x]].<f>.f.f.f", "rnd<x>.c<_>.[x].+.<p>.[p]out",
])
def test_print_parse_round_trip(text):
    t = parse(text, ("consts",))
    assert parse(str(t), ("consts",)) == t


@given(seeds)
def test_print_parse_round_trip_random(seed):
    t = rand_term(seed)
    assert parse(str(t)) == t


def test_size_counts_actions_and_nil():
    assert parse("*").size == 1
    assert parse("<x>.[x].[x]").size == 8  # [x] pushes x.*, of size 2
    assert parse("[<y>.y].<x>.[x].x").size == 10


def test_free_variables_and_locations():
    t = parse("a<x>.[x]b.y.[<z>.z.w]c")
    assert free_vars(t) == {"y", "w"}
    assert locations(t) == {"a", "b", "c", MAIN}


def test_sequential_composition_is_concatenation():
    m, n = parse("<x>.[x]a"), parse("a<y>.[y].[y]")
    assert compose(m, n) == parse("<x>.[x]a.a<y>.[y].[y]")
    assert compose(NIL, n) == n


def test_composition_renames_capturing_binders():
    # the trailing x belongs to the outer scope and must stay free
    t = compose(parse("<x>"), parse("x"))
    assert free_vars(t) == {"x"}


def test_let_desugars_to_push_pop():
    assert parse("(f = <x>.[x]); f.f") == parse("[<x>.[x]].<f>.f.f")


def test_sugar_operations():
    assert parse("print") == parse("<x>.[x]out")
    assert parse("read") == parse("in<x>.[x]")
    assert parse("rand") == parse("rnd<x>.[x]")
    assert parse("get c") == parse("c<x>.[x]c.[x]")
    assert parse("set c") == parse("<x>.c<_>.[x]c")


def test_substitution_is_capture_avoiding():
    target = parse("<y>.x.[y]")
    out = substitute(parse("y"), "x", target)
    assert "y" in free_vars(out)
    assert alpha_eq(out, parse("<z>.y.[z]"))


def test_substitution_composes_prefix_variable():
    # {N/x}(x.M) runs N, then M
    assert substitute(parse("[a]b"), "x", parse("x.[c]")) == parse("[a]b.[c]")


@given(seeds)
def test_alpha_key_ignores_binder_names(seed):
    t = rand_term(seed)
    renamed = parse(str(t).replace("x", "q"))
    assert alpha_eq(t, renamed)
    assert alpha_key(t) == alpha_key(renamed)


def test_alpha_eq_distinguishes_locations():
    assert not alpha_eq(parse("a<x>.x"), parse("b<x>.x"))
    assert alpha_eq(parse("a<x>.x"), parse("a<y>.y"))


@pytest.mark.parametrize("text, position", [
    ("[", 1), ("<x", 2), ("a<x>.]", 5), ("<_>._", 4),
])
def test_parse_errors_report_position(text, position):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert info.value.pos == position
    assert f"position {position}" in str(info.value)


def test_constants_need_feature():
    with pytest.raises(ParseError):
        parse("[1].[2].+")
    assert len(parse("[1].[2].+", ("consts",)).actions) == 3


def test_enumeration_counts():
    assert [count_closed_terms(n) for n in range(1, 8)] == [1, 3, 11, 45, 215, 1141, 6635]
    terms = list(closed_terms(5))
    assert len({alpha_key(t) for t in terms}) == len(terms)
    assert all(not t.fv for t in terms)
