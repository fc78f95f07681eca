"""Structural fixpoint semantics and an independent small-step oracle.

`sem` computes the denotation triple by structural recursion: basic commands
via `prim`, sequences via composition, conditionals as the join of the two
guarded branches, and loops from two fixpoints: the least fixpoint of the
body transformer gives the executions reaching the loop head, and the
greatest fixpoint of the divergence transformer gives the starts that iterate
forever.  All fixpoints run to stabilization; every carrier here is finite,
so no widening is needed and the iteration count is bounded by the carrier
size.

`oracle_sem` rebuilds the same triple from the reachable configuration graph
of a small-step machine; on a finite graph an execution diverges exactly when
it can reach a cycle.  The two routes are independent, which is what makes
sem == oracle_sem a meaningful check.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import lang, rel_domain as rd
from .lang import (Assign, BoolTest, Break, If, RandAssign, Seq, Skip, While,
                   neg)
from .rel_domain import SemTriple, StateSpace, compose, join, prim


class NonMonotoneError(Exception):
    """Raised when fixpoint iterates fail to form a chain."""

    def __init__(self, iteration: int):
        super().__init__("iterate %d is not comparable with its predecessor"
                         % iteration)
        self.iteration = iteration


class FixpointDivergenceError(Exception):
    pass


@dataclass(frozen=True)
class FixpointReport:
    iterations: int
    stabilized: bool
    result: object


def lfp(f: Callable, bottom, le: Callable = None, max_iter: int = None) -> FixpointReport:
    """Least fixpoint by Kleene iteration from `bottom`.

    `le` (if given) checks that the iterates increase; a violation means the
    caller's function is not monotone and raises NonMonotoneError naming the
    offending iterate.  `max_iter` bounds the iteration (use the lattice
    height); exceeding it raises instead of looping.
    """
    x = bottom
    n = 0
    while True:
        y = f(x)
        n += 1
        if y == x:
            return FixpointReport(n, True, x)
        if le is not None and not le(x, y):
            raise NonMonotoneError(n)
        if max_iter is not None and n > max_iter:
            raise FixpointDivergenceError("no fixpoint after %d iterations" % n)
        x = y


def gfp(f: Callable, top, ge: Callable = None, max_iter: int = None) -> FixpointReport:
    """Greatest fixpoint by iteration from `top`; dual of lfp."""
    x = top
    n = 0
    while True:
        y = f(x)
        n += 1
        if y == x:
            return FixpointReport(n, True, x)
        if ge is not None and not ge(x, y):
            raise NonMonotoneError(n)
        if max_iter is not None and n > max_iter:
            raise FixpointDivergenceError("no fixpoint after %d iterations" % n)
        x = y


def _subset(a, b):
    return a <= b


def _supset(a, b):
    return a >= b


# ---------------------------------------------------------------------------
# Loop transformers

def body_triple(b: lang.BExpr, body: lang.Stmt, space: StateSpace) -> SemTriple:
    """Denotation of the guarded body B;S."""
    return compose(prim(BoolTest(b), space), sem(body, space))


def loop_entry_fixpoints(b, body, space: StateSpace):
    """Least fixpoints of the backward and forward entry transformers.

    Both characterize the executions reaching the loop head after finitely
    many terminating body iterations; they agree (checked in tests).
    Returns (backward_report, forward_report).
    """
    bs = body_triple(b, body, space)
    ident = rd.identity_rel(space)
    bound = len(space.states()) ** 2 + 2
    backward = lfp(lambda x: ident | rd.compose_rel(bs.e, x),
                   frozenset(), le=_subset, max_iter=bound)
    forward = lfp(lambda x: ident | rd.compose_rel(x, bs.e),
                  frozenset(), le=_subset, max_iter=bound)
    return backward, forward


def loop_divergence_fixpoint(b, body, space: StateSpace):
    """Greatest fixpoint of the divergence transformer X -> pre[B;S](X)."""
    bs = body_triple(b, body, space)
    top = frozenset(space.states())
    return gfp(lambda x: rd.rel_into(bs.e, x), top,
               ge=_supset, max_iter=len(top) + 2)


def powers(rel, space: StateSpace, n: int) -> list:
    """Relation powers X^0 = identity, X^{d+1} = X ; X^d."""
    out = [rd.identity_rel(space)]
    for _ in range(n):
        out.append(rd.compose_rel(rel, out[-1]))
    return out


# ---------------------------------------------------------------------------
# Structural semantics

def sem(s: lang.Stmt, space: StateSpace) -> SemTriple:
    """Denotation triple of a statement.

    Free breaks land in the br component; callers that want a whole program
    (empty top-level br) should run validate_breaks first.
    """
    if isinstance(s, (Assign, RandAssign, Skip, Break, BoolTest)):
        return prim(s, space)
    if isinstance(s, Seq):
        return compose(sem(s.first, space), sem(s.second, space))
    if isinstance(s, If):
        t1 = compose(prim(BoolTest(s.cond), space), sem(s.then, space))
        t2 = compose(prim(BoolTest(neg(s.cond)), space), sem(s.orelse, space))
        return join(t1, t2)
    if isinstance(s, While):
        bs = body_triple(s.cond, s.body, space)
        reach = loop_entry_fixpoints(s.cond, s.body, space)[0].result
        exit_rel = prim(BoolTest(neg(s.cond)), space).e | bs.br
        e = rd.compose_rel(reach, exit_rel)
        body_div = rd.rel_into(reach, bs.inf)
        loop_div = loop_divergence_fixpoint(s.cond, s.body, space).result
        return SemTriple(e, body_div | loop_div, frozenset())
    raise TypeError(s)


# ---------------------------------------------------------------------------
# Small-step oracle

def _step(frames: tuple, sigma, space: StateSpace):
    """One small step: returns (successors, terminal) where terminal is
    None, 'end', or 'break'.  A config with no successors and no terminal is
    a filtered-out execution (failed test or pruned assignment)."""
    if not frames:
        return (), "end"
    head, rest = frames[0], frames[1:]
    if head[0] == "loop":
        w = head[1]
        if rd.eval_bexpr(w.cond, space, sigma):
            return (((("s", w.body),) + frames, sigma),), None
        return ((rest, sigma),), None
    s = head[1]
    if isinstance(s, Skip):
        return ((rest, sigma),), None
    if isinstance(s, Assign):
        i = space.index(s.var)
        v = space.clip(i, rd.eval_aexpr(s.expr, space, sigma))
        if v is None:
            return (), None
        return ((rest, sigma[:i] + (v,) + sigma[i + 1:]),), None
    if isinstance(s, RandAssign):
        i = space.index(s.var)
        lo = max(space.lo[i], s.lo)
        hi = min(space.hi[i], s.hi)
        if lo > hi:
            return (), None
        return tuple((rest, sigma[:i] + (v,) + sigma[i + 1:])
                     for v in range(int(lo), int(hi) + 1)), None
    if isinstance(s, BoolTest):
        if rd.eval_bexpr(s.cond, space, sigma):
            return ((rest, sigma),), None
        return (), None
    if isinstance(s, Seq):
        return (((("s", s.first), ("s", s.second)) + rest, sigma),), None
    if isinstance(s, If):
        branch = s.then if rd.eval_bexpr(s.cond, space, sigma) else s.orelse
        return (((("s", branch),) + rest, sigma),), None
    if isinstance(s, While):
        return (((("loop", s),) + rest, sigma),), None
    if isinstance(s, Break):
        for k, fr in enumerate(frames):
            if fr[0] == "loop":
                return ((frames[k + 1:], sigma),), None
        return (), "break"
    raise TypeError(s)


def oracle_sem(s: lang.Stmt, space: StateSpace) -> SemTriple:
    """Independent denotation from the reachable configuration graph.

    A free break (no enclosing loop) terminates the program via the br
    component, matching the structural semantics on such fragments.
    """
    succs: dict = {}
    terminal: dict = {}
    initials = {sigma: ((("s", s),), sigma) for sigma in space.states()}

    stack = list(initials.values())
    while stack:
        cfg = stack.pop()
        if cfg in succs:
            continue
        nxt, term = _step(cfg[0], cfg[1], space)
        succs[cfg] = nxt
        terminal[cfg] = term
        stack.extend(n for n in nxt if n not in succs)

    # configs lying on a cycle, then configs that can reach a cycle
    index_of: dict = {}
    low: dict = {}
    on_stack: set = set()
    sstack: list = []
    counter = [0]
    cyclic: set = set()

    def tarjan(root):
        work = [(root, iter(succs[root]))]
        index_of[root] = low[root] = counter[0]
        counter[0] += 1
        sstack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for child in it:
                if child not in index_of:
                    index_of[child] = low[child] = counter[0]
                    counter[0] += 1
                    sstack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(succs[child])))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index_of[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index_of[node]:
                scc = []
                while True:
                    member = sstack.pop()
                    on_stack.discard(member)
                    scc.append(member)
                    if member == node:
                        break
                if len(scc) > 1 or any(m in succs[m] for m in scc):
                    cyclic.update(scc)

    for cfg in initials.values():
        if cfg not in index_of:
            tarjan(cfg)

    to_cycle: set = set(cyclic)
    changed = True
    while changed:
        changed = False
        for cfg, nxt in succs.items():
            if cfg not in to_cycle and any(n in to_cycle for n in nxt):
                to_cycle.add(cfg)
                changed = True

    e_pairs = set()
    br_pairs = set()
    div = set()
    for sigma0, init_cfg in initials.items():
        seen = {init_cfg}
        frontier = [init_cfg]
        while frontier:
            cfg = frontier.pop()
            term = terminal[cfg]
            if term == "end":
                e_pairs.add((sigma0, cfg[1]))
            elif term == "break":
                br_pairs.add((sigma0, cfg[1]))
            for n in succs[cfg]:
                if n not in seen:
                    seen.add(n)
                    frontier.append(n)
        if init_cfg in to_cycle:
            div.add(sigma0)

    return SemTriple(frozenset(e_pairs), frozenset(div), frozenset(br_pairs))
