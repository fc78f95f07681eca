import random

import pytest

from hyperlab import interpreter as it
from hyperlab import trace_domain as td
from hyperlab.lang import Skip, parse, validate_breaks
from hyperlab.rel_domain import StateSpace
from hyperlab.selftest import SPACE_TRACE, TRACE_SRC, random_program, trace_expected


def test_trace_sem_skip_duplicates_each_state():
    space = StateSpace.make(("x",), 0, 2)
    t = td.trace_sem(Skip(), space, 5)
    assert t.finite == frozenset((s, s) for s in space.states())
    assert not t.truncated and t.div_starts == frozenset()


def test_trace_sem_rejects_zero_cap():
    with pytest.raises(ValueError):
        td.trace_sem(Skip(), StateSpace.make(("x",), 0, 1), 0)


def test_paper_loop_traces_present_at_l8():
    t = td.trace_sem(parse(TRACE_SRC), SPACE_TRACE, 8)
    assert tuple((v,) for v in (-2, 0, 2)) in t.finite
    assert tuple((v,) for v in (-3, -1, 1)) in t.finite
    assert frozenset(((3,), (4,), (5,))) <= t.div_starts


def test_paper_loop_closed_form_at_l10():
    t = td.trace_sem(parse(TRACE_SRC), SPACE_TRACE, 10)
    assert t.finite == trace_expected()
    assert t.div_starts == frozenset(((3,), (4,), (5,)))


def test_concat_merges_middle_state_and_caps():
    a = frozenset({((0,), (1,))})
    b = frozenset({((1,), (2,)), ((3,), (4,))})
    out, cut = td.concat(a, b, 5)
    assert out == frozenset({((0,), (1,), (2,))}) and not cut
    out, cut = td.concat(a, b, 2)
    assert out == frozenset() and cut


def test_concat_associative_with_unit():
    rng = random.Random(21)
    space = StateSpace.make(("x",), 0, 2)
    sts = space.states()

    def rand_traces():
        out = set()
        for _ in range(rng.randint(1, 5)):
            n = rng.randint(1, 3)
            out.add(tuple(rng.choice(sts) for _ in range(n)))
        return frozenset(out)

    unit = frozenset((s,) for s in sts)
    for _ in range(80):
        t1, t2, t3 = rand_traces(), rand_traces(), rand_traces()
        cap = 12
        ab_, _ = td.concat(t1, t2, cap)
        lhs, _ = td.concat(ab_, t3, cap)
        bc, _ = td.concat(t2, t3, cap)
        rhs, _ = td.concat(t1, bc, cap)
        assert lhs == rhs
        assert td.concat(t1, unit, cap)[0] == t1
        assert td.concat(unit, t1, cap)[0] == t1


def test_abstract_to_rel_trivial_cases():
    space = StateSpace.make(("x",), 0, 1)
    stutter = td.trace_sem(Skip(), space, 3)
    pairs, div = td.abstract_to_rel(stutter)
    assert pairs == frozenset((s, s) for s in space.states())
    assert div == frozenset()
    empty = td.TraceSet(frozenset(), frozenset(), False)
    assert td.abstract_to_rel(empty) == (frozenset(), frozenset())


def test_abstract_to_rel_on_terminating_countdown():
    space = StateSpace.make(("y",), 0, 2)
    prog = parse("while (y != 0) y = y - 1;")
    t = td.trace_sem(prog, space, 8)
    assert not t.truncated
    pairs, div = td.abstract_to_rel(t)
    assert pairs == frozenset((s, (0,)) for s in space.states())
    assert div == frozenset()


def test_commutation_on_random_programs():
    rng = random.Random(22)
    done = 0
    while done < 120:
        with_loops = rng.random() < 0.4
        s, space = random_program(rng, depth=3, allow_while=with_loops)
        if validate_breaks(s) is not None:
            continue
        if space.size() > 16:
            space = StateSpace.make(space.vars, 0, 2)
        done += 1
        t = td.trace_sem(s, space, 9)
        if t.truncated:
            continue
        pairs, div = td.abstract_to_rel(t)
        ref = it.sem(s, space)
        assert pairs == ref.e and div == ref.inf


def test_break_traces_have_no_extra_state():
    space = StateSpace.make(("x",), 0, 3)
    prog = parse("while (x > 0) { if (x == 2) break; x = x - 1; }")
    t = td.trace_sem(prog, space, 6)
    # one skip stutter from the else branch, then the break stops at 2
    # without duplicating the final state
    assert ((3,), (3,), (2,)) in t.finite
    assert all(not (len(p) >= 2 and p[-1] == p[-2] == (2,)) for p in t.finite)


def test_dump_format_is_sorted_and_stable():
    space = StateSpace.make(("x",), 0, 1)
    t = td.trace_sem(Skip(), space, 3)
    text = td.dump_traces(t, space)
    assert text.splitlines() == ["x:0;x:0", "x:1;x:1"]
