"""Hyperproperty abstraction algebra on finitely presented lattices.

`ToyLattice` is an explicit finite lattice (elements, decidable order); the
constructor validates the partial-order and lattice axioms eagerly.
`ChainPoset` adds declared chain families with limits: the chain-limit
operators quantify over the declared families only (plus all finite chains,
whose limits are already members), which under-approximates "all chains" but
suffices for every counterexample reproduced here.  A family may be marked
parametric, meaning the listed members stand for an infinite chain whose
limit is the declared one rather than the least listed member.

Subsets of the carrier are plain frozensets in the public API; internally
they are bitmasks so the exhaustive law batteries stay fast.

Operator census: join/gamma pair, homomorphic image, elimination, principal
ideal and filter, order ideal and filter, min/max frontiers, frontier order
ideals, chain-limit and starred chain-limit closures, the conjunctive
combination of one ideal-kind and one filter-kind operator, the lower
closures rho/phi, the frontier rho-elimination, and the hyperproperty
families AEH, AAH, EAH, NI, GNI, GD.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Optional

from .rel_domain import SemTriple


class LatticeError(Exception):
    pass


class ToyLattice:
    """Finite lattice given by elements and a decidable order."""

    def __init__(self, elements: Iterable, leq: Callable, validate: bool = True):
        self.elements = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise LatticeError("duplicate elements")
        self._idx = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        self._down = [0] * n  # down[i]: mask of elements below element i
        self._up = [0] * n
        for i, a in enumerate(self.elements):
            for j, b in enumerate(self.elements):
                if leq(b, a):
                    self._down[i] |= 1 << j
                if leq(a, b):
                    self._up[i] |= 1 << j
        if validate:
            self._validate()
        full = (1 << n) - 1
        bots = [i for i in range(n) if self._up[i] == full]
        tops = [i for i in range(n) if self._down[i] == full]
        if len(bots) != 1 or len(tops) != 1:
            raise LatticeError("missing top or bottom")
        self._bot_i, self._top_i = bots[0], tops[0]
        self.bot = self.elements[self._bot_i]
        self.top = self.elements[self._top_i]
        self._join_tab = {}
        self._meet_tab = {}
        for i in range(n):
            for j in range(i, n):
                ub = self._up[i] & self._up[j]
                lb = self._down[i] & self._down[j]
                jn = self._unique_extreme(ub, lower=True)
                mt = self._unique_extreme(lb, lower=False)
                if jn is None or mt is None:
                    raise LatticeError(
                        "no unique lub/glb for %r, %r" %
                        (self.elements[i], self.elements[j]))
                self._join_tab[(i, j)] = self._join_tab[(j, i)] = jn
                self._meet_tab[(i, j)] = self._meet_tab[(j, i)] = mt

    def _validate(self):
        n = len(self.elements)
        for i in range(n):
            if not self._down[i] & (1 << i):
                raise LatticeError("order not reflexive")
            for j in range(n):
                below = self._down[i] & (1 << j)
                if below and self._down[j] & (1 << i) and i != j:
                    raise LatticeError("order not antisymmetric")
                if below and (self._down[j] & ~self._down[i]):
                    raise LatticeError("order not transitive")

    def _unique_extreme(self, mask: int, lower: bool) -> Optional[int]:
        # least element of an upper-bound set / greatest of a lower-bound set
        best = None
        m = mask
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            cover = self._down[i] if not lower else self._up[i]
            if cover & mask == mask:
                if best is not None:
                    return None
                best = i
        return best

    # ---- constructors -----------------------------------------------------
    @classmethod
    def powerset(cls, base: Iterable) -> "ToyLattice":
        items = tuple(base)
        elems = [frozenset(c) for r in range(len(items) + 1)
                 for c in combinations(items, r)]
        return cls(elems, lambda a, b: a <= b, validate=False)

    @classmethod
    def from_pairs(cls, elements: Iterable, pairs: Iterable) -> "ToyLattice":
        """Order generated by `pairs` (reflexive-transitive closure taken)."""
        elems = tuple(elements)
        idx = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        le = [[False] * n for _ in range(n)]
        for i in range(n):
            le[i][i] = True
        for a, b in pairs:
            le[idx[a]][idx[b]] = True
        for k in range(n):
            for i in range(n):
                if le[i][k]:
                    row_k = le[k]
                    row_i = le[i]
                    for j in range(n):
                        if row_k[j]:
                            row_i[j] = True
        return cls(elems, lambda a, b: le[idx[a]][idx[b]])

    # ---- basics -----------------------------------------------------------
    def index(self, e) -> int:
        return self._idx[e]

    def leq(self, a, b) -> bool:
        return bool(self._down[self._idx[b]] & (1 << self._idx[a]))

    def mask(self, subset: Iterable) -> int:
        m = 0
        for e in subset:
            m |= 1 << self._idx[e]
        return m

    def unmask(self, m: int) -> frozenset:
        out = []
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            out.append(self.elements[i])
        return frozenset(out)

    def subsets(self):
        """All subsets of the carrier as masks (exhaustive batteries)."""
        return range(1 << len(self.elements))

    def join(self, subset: Iterable):
        i = self._bot_i
        for e in subset:
            i = self._join_tab[(i, self._idx[e])]
        return self.elements[i]

    def meet(self, subset: Iterable):
        i = self._top_i
        for e in subset:
            i = self._meet_tab[(i, self._idx[e])]
        return self.elements[i]

    # ---- mask-level operators ---------------------------------------------
    def down_mask(self, m: int) -> int:
        out = 0
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            out |= self._down[i]
        return out

    def up_mask(self, m: int) -> int:
        out = 0
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            out |= self._up[i]
        return out

    def min_mask(self, m: int) -> int:
        out = 0
        mm = m
        while mm:
            i = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            if self._down[i] & m & ~(1 << i) == 0:
                out |= 1 << i
        return out

    def max_mask(self, m: int) -> int:
        out = 0
        mm = m
        while mm:
            i = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            if self._up[i] & m & ~(1 << i) == 0:
                out |= 1 << i
        return out

    def principal_ideal_mask(self, m: int) -> int:
        i = self._bot_i
        mm = m
        while mm:
            j = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            i = self._join_tab[(i, j)]
        return self._down[i]

    def principal_filter_mask(self, m: int) -> int:
        i = self._top_i
        mm = m
        while mm:
            j = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            i = self._meet_tab[(i, j)]
        return self._up[i]

    def rho_down_mask(self, m: int) -> int:
        out = 0
        mm = m
        while mm:
            i = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            if self._down[i] & ~m == 0:
                out |= 1 << i
        return out

    def phi_mask(self, f, m: int) -> int:
        fi = self._idx[f]
        out = 0
        mm = m
        while mm:
            i = (mm & -mm).bit_length() - 1
            mm &= mm - 1
            if not self._down[i] & (1 << fi):
                continue
            interval = self._down[i] & self._up[fi]
            if interval & ~m == 0:
                out |= 1 << i
        return out

    def rho_frontier_mask(self, m: int) -> int:
        out = 0
        front = self.min_mask(m)
        while front:
            fi = (front & -front).bit_length() - 1
            front &= front - 1
            out |= self.phi_mask(self.elements[fi], m)
        return out


# ---------------------------------------------------------------------------
# Declared chain families

@dataclass(frozen=True)
class Family:
    name: str
    elements: tuple
    limit: object
    direction: str = "down"        # 'down': decreasing chain with glb limit
    parametric: bool = True        # listed members stand for an infinite tail


@dataclass(frozen=True)
class ChainPoset:
    lattice: ToyLattice
    families: tuple = ()

    def __post_init__(self):
        for f in self.families:
            lat = self.lattice
            seq = f.elements
            if f.direction not in ("down", "up"):
                raise LatticeError("bad direction %r" % f.direction)
            dec = f.direction == "down"
            for a, b in zip(seq, seq[1:]):
                if dec and not lat.leq(b, a):
                    raise LatticeError("family %s not decreasing" % f.name)
                if not dec and not lat.leq(a, b):
                    raise LatticeError("family %s not increasing" % f.name)
            for e in seq:
                if dec and not lat.leq(f.limit, e):
                    raise LatticeError("limit of %s not a lower bound" % f.name)
                if not dec and not lat.leq(e, f.limit):
                    raise LatticeError("limit of %s not an upper bound" % f.name)
            if not f.parametric:
                bound = lat.meet(seq) if dec else lat.join(seq)
                if bound != f.limit:
                    raise LatticeError("limit of %s is not its glb/lub" % f.name)


def _as_chainposet(cp) -> ChainPoset:
    return cp if isinstance(cp, ChainPoset) else ChainPoset(cp, ())


# ---------------------------------------------------------------------------
# Abstraction operators (public frozenset API)

def alpha_join(lat: ToyLattice, props: Iterable):
    return lat.join(props)


def gamma_join(lat: ToyLattice, q) -> frozenset:
    return lat.unmask(lat._down[lat.index(q)])


def homomorphic(h: Callable, props: Iterable) -> frozenset:
    return frozenset(h(p) for p in props)


def eliminate(props: Iterable, interest: Iterable) -> frozenset:
    return frozenset(props) & frozenset(interest)


def principal_ideal(lat: ToyLattice, props: Iterable) -> frozenset:
    return lat.unmask(lat.principal_ideal_mask(lat.mask(props)))


def principal_filter(lat: ToyLattice, props: Iterable) -> frozenset:
    return lat.unmask(lat.principal_filter_mask(lat.mask(props)))


def order_ideal(lat: ToyLattice, props: Iterable) -> frozenset:
    return lat.unmask(lat.down_mask(lat.mask(props)))


def order_filter(lat: ToyLattice, props: Iterable) -> frozenset:
    return lat.unmask(lat.up_mask(lat.mask(props)))


def frontier_min(lat: ToyLattice, props: Iterable) -> frozenset:
    return lat.unmask(lat.min_mask(lat.mask(props)))


def frontier_max(lat: ToyLattice, props: Iterable) -> frozenset:
    return lat.unmask(lat.max_mask(lat.mask(props)))


def frontier_order_ideal(lat: ToyLattice, props: Iterable, dual=False) -> frozenset:
    """Up-closure of the min frontier; with dual=True the down-closure of the
    max frontier."""
    m = lat.mask(props)
    if dual:
        return lat.unmask(lat.down_mask(lat.max_mask(m)))
    return lat.unmask(lat.up_mask(lat.min_mask(m)))


def rho_subseteq(lat: ToyLattice, props: Iterable) -> frozenset:
    """Lower closure keeping the members whose down-set stays inside."""
    return lat.unmask(lat.rho_down_mask(lat.mask(props)))


def phi_subseteq(lat: ToyLattice, f, props: Iterable) -> frozenset:
    return lat.unmask(lat.phi_mask(f, lat.mask(props)))


def rho_frontier(lat: ToyLattice, props: Iterable) -> frozenset:
    return lat.unmask(lat.rho_frontier_mask(lat.mask(props)))


def chain_down(cp, props: Iterable) -> frozenset:
    """Add the limits of declared decreasing chains wholly inside the set.

    Finite chains contribute nothing new: on a finite carrier the glb of a
    finite decreasing chain is its least member, already in the set.
    """
    cp = _as_chainposet(cp)
    given = frozenset(props)
    out = set(given)
    for f in cp.families:
        if f.direction == "down" and set(f.elements) <= given:
            out.add(f.limit)
    return frozenset(out)


def chain_up(cp, props: Iterable) -> frozenset:
    cp = _as_chainposet(cp)
    given = frozenset(props)
    out = set(given)
    for f in cp.families:
        if f.direction == "up" and set(f.elements) <= given:
            out.add(f.limit)
    return frozenset(out)


def _star(op, cp, props):
    cp = _as_chainposet(cp)
    cap = len(cp.families) + len(cp.lattice.elements) + 1
    x = frozenset(props)
    for _ in range(cap):
        y = x | op(cp, x)
        if y == x:
            return x
        x = y
    raise LatticeError("starred chain closure did not stabilize")


def chain_down_star(cp, props: Iterable) -> frozenset:
    return _star(chain_down, cp, props)


def chain_up_star(cp, props: Iterable) -> frozenset:
    return _star(chain_up, cp, props)


def order_ideal_chain_up(cp, props: Iterable) -> frozenset:
    """The composed operator alpha-ideal after chain-up (one application)."""
    cp = _as_chainposet(cp)
    return order_ideal(cp.lattice, chain_up(cp, props))


def order_ideal_chain_up_star(cp, props: Iterable) -> frozenset:
    return _star(lambda c, p: order_ideal_chain_up(c, p), cp, props)


def order_filter_chain_down(cp, props: Iterable) -> frozenset:
    cp = _as_chainposet(cp)
    return order_filter(cp.lattice, chain_down(cp, props))


def order_filter_chain_down_star(cp, props: Iterable) -> frozenset:
    return _star(lambda c, p: order_filter_chain_down(c, p), cp, props)


OPS_IDEAL_KIND = {
    "order_ideal": lambda cp, p: order_ideal(_as_chainposet(cp).lattice, p),
    "frontier_order_ideal_dual": lambda cp, p: frontier_order_ideal(
        _as_chainposet(cp).lattice, p, dual=True),
    "order_ideal_chain_up_star": order_ideal_chain_up_star,
    "principal_ideal": lambda cp, p: principal_ideal(_as_chainposet(cp).lattice, p),
}

OPS_FILTER_KIND = {
    "order_filter": lambda cp, p: order_filter(_as_chainposet(cp).lattice, p),
    "frontier_order_ideal": lambda cp, p: frontier_order_ideal(
        _as_chainposet(cp).lattice, p),
    "order_filter_chain_down_star": order_filter_chain_down_star,
    "principal_filter": lambda cp, p: principal_filter(_as_chainposet(cp).lattice, p),
}


def conjunctive(alpha1: str, alpha2: str, cp, props: Iterable) -> frozenset:
    """Reduced-product style conjunction of an ideal-kind and a filter-kind
    abstraction."""
    if alpha1 not in OPS_IDEAL_KIND:
        raise ValueError("alpha1 must be ideal-kind, got %r" % alpha1)
    if alpha2 not in OPS_FILTER_KIND:
        raise ValueError("alpha2 must be filter-kind, got %r" % alpha2)
    return OPS_IDEAL_KIND[alpha1](cp, props) & OPS_FILTER_KIND[alpha2](cp, props)


# ---------------------------------------------------------------------------
# Presented subsets of a ChainPoset (counterexample support)

def _frontier_presented(cp: ChainPoset, explicit, included_families,
                        direction: str) -> frozenset:
    elems = set(explicit)
    blocked = set()
    for name in included_families:
        fam = next(f for f in cp.families if f.name == name)
        if fam.direction != direction or not fam.parametric:
            raise LatticeError("included family %s is not a parametric "
                               "%s-chain" % (name, direction))
        elems.update(fam.elements)
        blocked.update(e for e in fam.elements if e != fam.limit)
    lat = cp.lattice
    out = set()
    for p in elems:
        if p in blocked:
            continue
        if direction == "up":
            if any(lat.leq(p, q) and p != q for q in elems):
                continue
        else:
            if any(lat.leq(q, p) and q != p for q in elems):
                continue
        out.add(p)
    return frozenset(out)


def frontier_max_presented(cp: ChainPoset, explicit: Iterable,
                           included_families: Iterable = ()) -> frozenset:
    """Maximal elements of a presented subset.

    Members of an included parametric up-family are never maximal: the
    family keeps growing beyond the listed fragment (the declared limit
    itself is not part of the presented set).
    """
    return _frontier_presented(cp, explicit, included_families, "up")


def frontier_min_presented(cp: ChainPoset, explicit: Iterable,
                           included_families: Iterable = ()) -> frozenset:
    """Minimal elements of a presented subset; members of an included
    parametric down-family keep descending and are never minimal."""
    return _frontier_presented(cp, explicit, included_families, "down")


# ---------------------------------------------------------------------------
# Hyperproperty families

@dataclass(frozen=True)
class _NamedOracle:
    fn: Callable
    name: str

    def contains(self, x) -> bool:
        return bool(self.fn(x))


def _aeh(a):
    def member(p):
        return all(any((x, y) in a for y in p) for x in p)
    return member


def _aah(a):
    def member(p):
        return all((x, y) in a for x in p for y in p)
    return member


def _eah(a):
    def member(p):
        return any(all((x, y) in a for y in p) for x in p)
    return member


def _executions(t) -> frozenset:
    # finite executions of a denotation triple, as (first, last) state pairs
    return t.e if isinstance(t, SemTriple) else frozenset(t)


def _ni(space, low, high):
    li = space.index(low)

    def member(t):
        runs = _executions(t)
        return all(s1[li] != s2[li] or e1[li] == e2[li]
                   for (s1, e1) in runs for (s2, e2) in runs)
    return member


def _gni(space, low, high):
    li, hi = space.index(low), space.index(high)

    def member(t):
        runs = _executions(t)
        for (s1, e1) in runs:
            for (s2, e2) in runs:
                if s1[li] != s2[li]:
                    continue
                if not any(s3[li] == s1[li] and s3[hi] == s2[hi]
                           and e3[li] == e1[li] for (s3, e3) in runs):
                    return False
        return True
    return member


def _gd(space, low, high):
    # the exact negation of generalized noninterference: some pair of
    # low-equal runs admits no third run masking the high influence
    li, hi = space.index(low), space.index(high)

    def member(t):
        runs = _executions(t)
        for (s1, e1) in runs:
            for (s2, _) in runs:
                if s1[li] != s2[li]:
                    continue
                if all(s3[li] != s1[li] or s3[hi] != s2[hi] or e3[li] != e1[li]
                       for (s3, e3) in runs):
                    return True
        return False
    return member


def family(name: str, *, A=None, carrier=None, space=None,
           low="l", high="h") -> _NamedOracle:
    """Membership oracle for a hyperproperty family member.

    AEH/AAH/EAH take an explicit relation A over the finite carrier and apply
    to subsets of it; NI/GNI/GD take low/high variable names and apply to
    denotation triples (their finite executions).
    """
    if name in ("AEH", "AAH", "EAH"):
        if A is None:
            raise ValueError("%s needs the relation A" % name)
        a = frozenset(A)
        fn = {"AEH": _aeh, "AAH": _aah, "EAH": _eah}[name](a)
        return _NamedOracle(fn, "%s(A)" % name)
    if name in ("NI", "GNI", "GD"):
        if space is None:
            raise ValueError("%s needs the state space" % name)
        fn = {"NI": _ni, "GNI": _gni, "GD": _gd}[name](space, low, high)
        return _NamedOracle(fn, "%s(low=%s,high=%s)" % (name, low, high))
    raise ValueError("unknown family %r" % name)


# ---------------------------------------------------------------------------
# Lattice description files

def lattice_from_config(cfg: dict):
    """Build a ToyLattice or ChainPoset from a description dict.

    Keys: elements (list of names), leq (list of [a,b] order pairs,
    reflexive-transitive closure taken), optional families with
    {family, elements, limit, direction, parametric}.
    """
    lat = ToyLattice.from_pairs(cfg["elements"],
                                [tuple(p) for p in cfg.get("leq", [])])
    fams = tuple(
        Family(f.get("family", "F%d" % k), tuple(f["elements"]), f["limit"],
               f.get("direction", "down"), f.get("parametric", True))
        for k, f in enumerate(cfg.get("families", ())))
    if fams:
        return ChainPoset(lat, fams)
    return lat
