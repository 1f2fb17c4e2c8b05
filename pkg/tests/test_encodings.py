import random

import pytest
from hypothesis import given, settings, strategies as st

from fmc.checks import adequacy_report, cbn_case, cbv_case
from fmc.encodings import (
    O, ForeignConstruct, SourceParseError, TBase, TFun, ThunksDisabled, cbv_term_type, desugar,
    encode, encode_types, parse_source, print_source,
)
from fmc.enumerate import source_programs
from fmc.machine import memory, run
from fmc.reduction import Strategy, normalize, perm_eq, reduction_sequence
from fmc.syntax import MAIN, alpha_eq, parse
from fmc.types import Z, arrow, has_type

C = ("consts",)
ZT = TBase("Z")
STATE_EXAMPLE = "a := 2; ((\\x. !a) (a := 3; 0))"


def enc(text, mode, features=("thunks",)):
    return encode(parse_source(text), mode, features)


def test_source_parser_round_trip():
    for text in [STATE_EXAMPLE, "\\x y. x", "write 1; read", "fst (1, 0)", "0 + 1",
                 "let x = return 1 in return x", "arr (\\y. y) >>> first (arr (\\y. 0))"]:
        m = parse_source(text)
        assert parse_source(print_source(m)) == m


def test_source_parse_error():
    with pytest.raises(SourceParseError):
        parse_source("\\x. (x")


def test_cbn_state_example_encoding():
    assert str(enc(STATE_EXAMPLE, "cbn")) == "a<_>.[2]a.[a<_>.[3]a.0].<x>.a<y>.[y]a.y"


def test_cbn_state_example_reduces_to_update_then_2():
    t = enc(STATE_EXAMPLE, "cbn")
    steps = reduction_sequence(t, Strategy.LO)
    assert len(steps) == 2
    assert perm_eq(steps[-1].after, desugar("a<_>.[2]a; 2"))


def test_cbn_effect_encodings():
    assert str(enc("read", "cbn")) == "in<x>.x"
    assert str(enc("write 1; 0", "cbn")) == "[1]out.0"
    assert str(enc("fst (1, 0)", "cbn")) == "[0].[1].<x1>.<x2>.x1"


def test_cbv_effect_encodings():
    assert str(enc("!c", "cbv")) == "c<x>.[x]c.[x]"
    assert alpha_eq(enc("write 1; 0", "cbv"), parse("[1].<x>.[x]out.[0]", C))


def test_cbv_state_example_normalizes_to_3():
    assert alpha_eq(normalize(enc(STATE_EXAMPLE, "cbv"), Strategy.FULL), parse("a<_>.[3]a.[3]", C))


def test_cbv_cannot_be_had_by_moving_effects():
    nf = normalize(enc("a := (\\x. b := 1; x) 0; !b", "cbv"), Strategy.FULL)
    assert alpha_eq(nf, parse("b<_>.a<_>.[0]a.[1]b.[1]", C))
    assert perm_eq(nf, desugar("a<_>.[0]a; b<_>.[1]b; [1]"))


def test_argument_orderings_give_different_reducts():
    left = desugar("c<_>.[2]c.c<x>.[x]c.c<_>.[3]c.[1].[x].[0].f")
    right = desugar("c<_>.[3]c.c<x>.[x]c.c<_>.[2]c.[1].[x].[0].f")
    assert alpha_eq(normalize(left), desugar("c<_>.[3]c.[1].[2].[0].f"))
    assert alpha_eq(normalize(right), desugar("c<_>.[2]c.[1].[3].[0].f"))


def test_cbn_leaves_arguments_unevaluated():
    t = enc("f (c := 2; 0) (!c) (c := 3; 1)", "cbn")
    assert alpha_eq(normalize(t), t)


def test_choice_uses_its_location():
    t = enc("0 + 1", "cbn")
    trace = run(memory({"nd": [str(parse("<x>.<y>.x"))]}, features=C), t)
    assert trace.halted


def test_cbpv_encodings():
    assert alpha_eq(enc("return 1 to x. return x", "cbpv"), parse("[1].<x>.[x]", C))
    assert str(enc("force (thunk (return 1))", "cbpv")) == "?!{[1]}"
    with pytest.raises(ThunksDisabled):
        enc("force (thunk (return 1))", "cbpv", ())
    with pytest.raises(ForeignConstruct):
        enc("thunk (return 1)", "cbpv")


def test_arrow_encodings_compose():
    t = enc("arr (\\y. y) >>> arr (\\y. 0)", "arrow")
    trace = run(memory({MAIN: ["5"]}, features=C), t)
    assert trace.halted


def test_kappa_encoding():
    assert alpha_eq(enc("kappa x. push x; apply", "kappa"), parse("<x>.[x].<y>.?y", ("thunks",)))


def test_languages_reject_foreign_constructs():
    with pytest.raises(ForeignConstruct):
        enc("return 1", "arrow")
    with pytest.raises(ForeignConstruct):
        enc("fst (1, 0)", "cbv")
    with pytest.raises(ForeignConstruct):
        enc("kappa x. apply", "cbn")


def test_type_translations():
    f = TFun(ZT, ZT)
    assert has_type({}, enc("\\x. x", "cbn"), encode_types(TFun(O, O), "cbn"))
    assert has_type({}, enc("\\x. x", "cbv"), cbv_term_type(f))
    assert has_type({}, enc("\\f. \\x. f (f x)", "cbn"),
                    encode_types(TFun(TFun(O, O), TFun(O, O)), "cbn"))
    assert has_type({}, enc("\\f. \\x. f (f x)", "cbv"), cbv_term_type(TFun(f, f)))
    assert has_type({}, enc("(\\x. x) 1", "cbv"), cbv_term_type(ZT))
    with pytest.raises(ForeignConstruct):
        encode_types(f, "cbn")


def test_stateful_cbv_program_has_effect_type():
    t = enc("a := 1; !a", "cbv")
    assert has_type({}, t, arrow({"a": (Z,)}, {"a": (Z,), MAIN: (Z,)}))


def test_adequacy_small_exhaustive():
    assert adequacy_report("cbn", max_size=4).ok
    assert adequacy_report("cbv", max_size=4).ok


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=150, deadline=None)
def test_random_programs_agree_with_oracles(seed):
    programs = list(source_programs(5))
    prog = programs[random.Random(seed).randrange(len(programs))]
    assert cbn_case(prog) in ("agree", "skip")
    assert cbv_case(prog) in ("agree", "skip")


def test_desugar_sugar_words():
    assert desugar("(f = rand; set c; get c); f; f; +; print") == parse(
        "(f = rand; set c; get c); f; f; +; print", C)
