"""Flows and effects of run intervals, with their semigroup products.

A flow records how the factors intercepted by an interval connect the
levels of its two border crossing sequences; an effect adds the crossing
sequences themselves.  Both form finite semigroups with an absorbing
bottom element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Optional

from .runs import Run, intercepted_factors

Edge = tuple[int, int]
EdgeSet = FrozenSet[Edge]


class _Bottom:
    """Absorbing element of both semigroups."""

    _instance: Optional["_Bottom"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOTTOM"


BOTTOM = _Bottom()


@dataclass(frozen=True)
class Flow:
    """Edge graph over levels 0..max(h1, h2)-1, split by endpoint parity.

    h1 and h2 are the heights of the left and right border crossing
    sequences.  Degree discipline: every even level < h1 has exactly one
    outgoing edge (in ll or lr) and every odd level < h1 exactly one
    incoming (ll or rl); every even level < h2 has exactly one incoming
    (lr or rr) and every odd level < h2 exactly one outgoing (rl or rr).
    """

    h1: int
    h2: int
    ll: EdgeSet  # even -> odd   (both on the left border)
    lr: EdgeSet  # even -> even  (left to right)
    rl: EdgeSet  # odd  -> odd   (right to left)
    rr: EdgeSet  # odd  -> even  (both on the right border)

    @property
    def nodes(self) -> int:
        return max(self.h1, self.h2)

    def edges(self) -> list[Edge]:
        return sorted(self.ll | self.lr | self.rl | self.rr)

    def is_valid(self) -> bool:
        for (y, z) in self.ll:
            if y % 2 or not z % 2 or y >= self.h1 or z >= self.h1:
                return False
        for (y, z) in self.lr:
            if y % 2 or z % 2 or y >= self.h1 or z >= self.h2:
                return False
        for (y, z) in self.rl:
            if not y % 2 or not z % 2 or y >= self.h2 or z >= self.h1:
                return False
        for (y, z) in self.rr:
            if not y % 2 or z % 2 or y >= self.h2 or z >= self.h2:
                return False
        out_left = [y for (y, _) in self.ll] + [y for (y, _) in self.lr]
        in_left = [z for (_, z) in self.ll] + [z for (_, z) in self.rl]
        out_right = [y for (y, _) in self.rl] + [y for (y, _) in self.rr]
        in_right = [z for (_, z) in self.lr] + [z for (_, z) in self.rr]
        return (sorted(out_left) == list(range(0, self.h1, 2))
                and sorted(in_left) == list(range(1, self.h1, 2))
                and sorted(out_right) == list(range(1, self.h2, 2))
                and sorted(in_right) == list(range(0, self.h2, 2)))

    def render(self) -> str:
        def fmt(name, edges):
            inner = ", ".join(f"{y}->{z}" for y, z in sorted(edges))
            return f"{name}: {{{inner}}}"
        return (f"flow h1={self.h1} h2={self.h2} "
                + " ".join(fmt(n, e) for n, e in
                           [("LL", self.ll), ("LR", self.lr),
                            ("RL", self.rl), ("RR", self.rr)]))


def _compose(a: frozenset, b: frozenset) -> frozenset:
    by_src: dict[int, list[int]] = {}
    for y, z in b:
        by_src.setdefault(y, []).append(z)
    return frozenset((y, w) for (y, z) in a for w in by_src.get(z, ()))


def _star(edges: frozenset, universe: int) -> frozenset:
    """Reflexive-transitive closure over levels 0..universe-1."""
    closure = {(y, y) for y in range(universe)} | set(edges)
    changed = True
    while changed:
        changed = False
        extra = _compose(frozenset(closure), frozenset(edges)) - closure
        if extra:
            closure |= extra
            changed = True
    return frozenset(closure)


def flow_product(f: Flow | _Bottom, g: Flow | _Bottom) -> Flow | _Bottom:
    """Kleene-composition of flows; BOTTOM when no valid flow results."""
    if f is BOTTOM or g is BOTTOM:
        return BOTTOM
    if f.h2 != g.h1:
        return BOTTOM
    universe = max(f.h1, f.h2, g.h1, g.h2)
    bounce_r = _star(_compose(g.ll, f.rr), universe)   # even mid -> even mid
    bounce_l = _star(_compose(f.rr, g.ll), universe)   # odd mid -> odd mid
    lr = _compose(_compose(f.lr, bounce_r), g.lr)
    rl = _compose(_compose(g.rl, bounce_l), f.rl)
    ll = f.ll | _compose(_compose(_compose(f.lr, bounce_r), g.ll), f.rl)
    rr = g.rr | _compose(_compose(_compose(g.rl, bounce_l), f.rr), g.lr)
    result = Flow(f.h1, g.h2, frozenset(ll), frozenset(lr),
                  frozenset(rl), frozenset(rr))
    if not result.is_valid():
        return BOTTOM
    return result


@dataclass(frozen=True)
class Effect:
    """A flow together with its border crossing sequences."""

    flow: Flow
    c1: tuple[str, ...]
    c2: tuple[str, ...]

    def __post_init__(self):
        if self.flow.h1 != len(self.c1) or self.flow.h2 != len(self.c2):
            raise ValueError("flow heights disagree with crossing sequences")

    def is_idempotent(self) -> bool:
        return effect_product(self, self) == self

    def render(self) -> str:
        return (f"effect c1=({','.join(self.c1)}) c2=({','.join(self.c2)}) "
                + self.flow.render())


def effect_product(e: Effect | _Bottom, f: Effect | _Bottom) -> Effect | _Bottom:
    if e is BOTTOM or f is BOTTOM:
        return BOTTOM
    if e.c2 != f.c1:
        return BOTTOM
    flow = flow_product(e.flow, f.flow)
    if flow is BOTTOM:
        return BOTTOM
    return Effect(flow, e.c1, f.c2)


def flow_of_interval(run: Run, x1: int, x2: int) -> Flow:
    """Flow of [x1, x2] from the intercepted factors' endpoint levels."""
    h1, h2 = run.height(x1), run.height(x2)
    ll, lr, rl, rr = set(), set(), set(), set()
    for kind, frag in intercepted_factors(run, x1, x2):
        edge = (frag.first.level, frag.last.level)
        {"LL": ll, "LR": lr, "RL": rl, "RR": rr}[kind].add(edge)
    flow = Flow(h1, h2, frozenset(ll), frozenset(lr),
                frozenset(rl), frozenset(rr))
    assert flow.is_valid(), "interval of a successful run gave invalid flow"
    return flow


def effect_of_interval(run: Run, x1: int, x2: int) -> Effect:
    return Effect(flow_of_interval(run, x1, x2),
                  run.crossing_sequence(x1), run.crossing_sequence(x2))


def enumerate_flows(max_nodes: int) -> list[Flow]:
    """All valid flows with max(h1, h2) <= max_nodes (for semigroup tests)."""
    from itertools import permutations
    flows = []
    for h1 in range(0, max_nodes + 1):
        for h2 in range(0, max_nodes + 1):
            if max(h1, h2) > max_nodes:
                continue
            left_out = list(range(0, h1, 2))
            left_in = list(range(1, h1, 2))
            right_out = list(range(1, h2, 2))
            right_in = list(range(0, h2, 2))
            sources = left_out + right_out
            targets = left_in + right_in
            if len(sources) != len(targets):
                continue
            for perm in permutations(targets):
                ll, lr, rl, rr = set(), set(), set(), set()
                ok = True
                for src, dst in zip(sources, perm):
                    if src in left_out and dst in left_in:
                        ll.add((src, dst))
                    elif src in left_out:
                        lr.add((src, dst))
                    elif dst in left_in:
                        rl.add((src, dst))
                    else:
                        rr.add((src, dst))
                flow = Flow(h1, h2, frozenset(ll), frozenset(lr),
                            frozenset(rl), frozenset(rr))
                if ok and flow.is_valid():
                    flows.append(flow)
    return flows
