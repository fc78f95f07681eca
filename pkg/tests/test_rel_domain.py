import random
from itertools import combinations, product

import pytest

from hyperlab.lang import ABin, Assign, BoolTest, Break, Cmp, Const, Skip, Var, parse
from hyperlab import interpreter as it
from hyperlab import rel_domain as rd
from hyperlab.rel_domain import (BOTTOM, SemTriple, StateSpace, compose, join,
                                 leq, meet, prim, pure_e, top_triple)
from hyperlab.selftest import random_program, random_triple


def test_prim_skip_is_pointwise_identity():
    space = StateSpace.make(("y",), 0, 1)
    t = prim(Skip(), space)
    assert t == pure_e({((0,), (0,)), ((1,), (1,))})


def test_prim_break_puts_identity_in_br():
    space = StateSpace.make(("y",), 0, 1)
    t = prim(Break(), space)
    assert t.e == frozenset() and t.inf == frozenset()
    assert t.br == rd.identity_rel(space)


def test_prim_assign_saturates():
    space = StateSpace.make(("y",), -1, 1)
    t = prim(Assign("y", ABin("-", Var("y"), Const(1))), space)
    assert t.e == frozenset({((-1,), (-1,)), ((0,), (-1,)), ((1,), (0,))})


def test_prim_assign_wrap_and_prune():
    wrap = StateSpace.make(("y",), 0, 2, "wrap")
    t = prim(Assign("y", ABin("+", Var("y"), Const(1))), wrap)
    assert ((2,), (0,)) in t.e
    prune = StateSpace.make(("y",), 0, 2, "prune")
    t = prim(Assign("y", ABin("+", Var("y"), Const(1))), prune)
    assert all(a[0] != 2 for a, _ in t.e)


def test_prim_rassign_clips_to_window():
    space = StateSpace.make(("y",), -2, 2)
    t = prim(rd.lang.RandAssign("y", rd.lang.NEG_INF, 0), space)
    assert t.e == frozenset((s, (v,)) for s in space.states()
                            for v in (-2, -1, 0))


def test_prim_unbound_variable():
    space = StateSpace.make(("y",), 0, 1)
    with pytest.raises(rd.UnboundVariableError):
        prim(Assign("z", Const(0)), space)


def test_compose_init_is_two_sided_unit():
    rng = random.Random(5)
    space = StateSpace.make(("x", "y"), 0, 2)  # nine states
    ident = prim("init", space)
    for _ in range(40):
        t = random_triple(rng, space)
        assert compose(t, ident) == t
        assert compose(ident, t) == t


def test_compose_divergent_everywhere_absorbs():
    space = StateSpace.make(("y",), 0, 1)
    div = SemTriple(frozenset(), frozenset(space.states()), frozenset())
    rng = random.Random(6)
    for _ in range(20):
        assert compose(div, random_triple(rng, space)) == div


def test_compose_two_step_chain():
    t1 = pure_e({((0,), (1,))})
    t2 = pure_e({((1,), (0,))})
    assert compose(t1, t2) == pure_e({((0,), (0,))})


def test_compose_is_associative():
    rng = random.Random(7)
    space = StateSpace.make(("x", "y"), 0, 2)
    for _ in range(60):
        a, b, c = (random_triple(rng, space) for _ in range(3))
        assert compose(compose(a, b), c) == compose(a, compose(b, c))


def test_join_bottom_unit_and_leq_infimum():
    rng = random.Random(8)
    space = StateSpace.make(("y",), 0, 2)
    for _ in range(20):
        t = random_triple(rng, space)
        assert join(t, BOTTOM) == t
        assert leq(BOTTOM, t)


def test_branch_join_reproduces_if_semantics():
    # both routes: structural join of guarded branches vs the oracle
    rng = random.Random(9)
    for _ in range(25):
        s, space = random_program(rng, depth=2)
        cond = Cmp("==", Var(space.vars[0]), Const(0))
        prog = rd.lang.If(cond, s, Skip())
        if rd.lang.validate_breaks(prog) is not None:
            continue
        branches = join(
            compose(prim(BoolTest(cond), space), it.sem(s, space)),
            compose(prim(BoolTest(rd.lang.Not(cond)), space),
                    it.sem(Skip(), space)))
        assert branches == it.oracle_sem(prog, space)


def _all_rels(space, limit=None):
    pairs = sorted(product(space.states(), space.states()))
    rels = [frozenset(c) for r in range(len(pairs) + 1)
            for c in combinations(pairs, r)]
    return rels if limit is None else random.Random(0).sample(rels, limit)


def test_compose_left_distributes_over_arbitrary_unions():
    space = StateSpace.make(("y",), 0, 1)
    rng = random.Random(10)
    rels = _all_rels(space)
    for _ in range(150):
        fam = [random_triple(rng, space) for _ in range(rng.randint(0, 3))]
        r = random_triple(rng, space)
        lhs = compose(rd.join_all(fam), r)
        rhs = rd.join_all(compose(x, r) for x in fam)
        assert lhs == rhs
    assert rels  # exhaustive relation universe was built


def test_compose_right_distributes_over_nonempty_unions_only():
    space = StateSpace.make(("y",), 0, 1)
    rng = random.Random(11)
    for _ in range(150):
        fam = [random_triple(rng, space) for _ in range(rng.randint(1, 3))]
        r = random_triple(rng, space)
        lhs = compose(r, rd.join_all(fam))
        rhs = rd.join_all(compose(r, x) for x in fam)
        assert lhs == rhs
    # the empty union fails when divergence is present: t ; bottom keeps inf
    t = SemTriple(frozenset(), frozenset(space.states()), frozenset())
    assert compose(t, BOTTOM) == t != BOTTOM


def test_triple_lattice_laws():
    rng = random.Random(12)
    space = StateSpace.make(("y",), 0, 1)
    top = top_triple(space)
    for _ in range(60):
        a, b = random_triple(rng, space), random_triple(rng, space)
        assert leq(meet(a, b), a) and leq(a, join(a, b))
        assert join(a, a) == a and meet(a, a) == a
        assert join(a, meet(a, b)) == a and meet(a, join(a, b)) == a
        assert leq(a, top)


def test_serialization_round_trip():
    rng = random.Random(13)
    space = StateSpace.make(("x", "y"), -1, 1)
    for _ in range(20):
        t = random_triple(rng, space)
        assert rd.triple_from_json(rd.triple_to_json(t)) == t


def test_space_config_round_trip():
    cfg = {"vars": ["x", "y"], "lo": -3, "hi": 3, "arith": "saturate"}
    space = StateSpace.from_config(cfg)
    assert space.to_config() == cfg
    per_var = StateSpace.make(("x", "y"), (0, -1), (1, 2))
    assert StateSpace.from_config(per_var.to_config()) == per_var


def test_sem_matches_paper_countdown():
    space = StateSpace.make(("y",), -3, 3)
    t = it.sem(parse("while (y != 0) y = y - 1;"), space)
    assert t.e == frozenset(((v,), (0,)) for v in range(0, 4))
    assert t.inf == frozenset((v,) for v in range(-3, 0))
    assert t.br == frozenset()
