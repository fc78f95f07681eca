import random

import pytest

from hyperlab.lang import (ABin, Assign, BoolTest, Break, Cmp, Const, If,
                           ParseError, RandAssign, Seq, Skip, Var, While,
                           components, parse, pretty, subtrees,
                           validate_breaks, NEG_INF, POS_INF)
from hyperlab.selftest import random_program


def test_parse_skip_atomic():
    assert parse("skip;") == Skip()


def test_parse_countdown_loop():
    got = parse("while (y!=0) y=y-1;")
    want = While(Cmp("!=", Var("y"), Const(0)),
                 Assign("y", ABin("-", Var("y"), Const(1))))
    assert got == want


def test_parse_unbounded_choice_then_loop():
    got = parse("x = [-oo,oo]; while (x!=0) { x=x-1; }")
    assert isinstance(got, Seq)
    assert got.first == RandAssign("x", NEG_INF, POS_INF)
    assert isinstance(got.second, While)


def test_parse_if_without_else_defaults_to_skip():
    got = parse("if (x>0) x=1;")
    assert got == If(Cmp(">", Var("x"), Const(0)), Assign("x", Const(1)), Skip())


def test_parse_boolean_operators_and_negative_literals():
    got = parse("if (!(x==1) && y < -2 || x >= y) skip; else break;")
    assert isinstance(got, If)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        parse("while (x != ) skip;")
    assert err.value.line == 1
    assert err.value.col > 1


def test_parse_error_on_trailing_garbage():
    with pytest.raises(ParseError):
        parse("skip; )")


def test_validate_breaks_bare_break_fails_at_root():
    assert validate_breaks(Break()) == []


def test_validate_breaks_directly_enclosed():
    assert validate_breaks(While(Cmp("<", Var("x"), Const(1)), Break())) is None


def test_validate_breaks_reports_path_after_loop():
    # exhaustive walk: the offending break is the second child of the Seq
    s = Seq(While(Cmp("<", Var("x"), Const(1)), Skip()), Break())
    assert validate_breaks(s) == [1]


def test_components_of_basic_statement_is_empty():
    assert components(Skip()) == frozenset()


def test_components_of_seq_and_while():
    a, b = Assign("x", Const(1)), Skip()
    assert components(Seq(a, b)) == frozenset((a, b))
    assert components(While(Cmp("<", Var("x"), Const(1)), a)) == frozenset((a,))


def test_component_relation_is_well_founded():
    s, _ = random_program(random.Random(7), depth=4)
    seen = list(subtrees(s))
    assert len(seen) < 200  # structural recursion terminates


def test_pretty_parse_round_trip_on_random_programs():
    rng = random.Random(1234)
    for _ in range(300):
        s, _ = random_program(rng, depth=4)
        text = pretty(s)
        assert parse(text) == s, text


def test_booltest_has_no_concrete_syntax():
    with pytest.raises(ValueError):
        pretty(BoolTest(Cmp("==", Var("x"), Const(0))))
