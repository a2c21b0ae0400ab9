"""Factorization forests over effect-labeled positions, and the
extraction of idempotent loops with output-producing anchors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .flows import BOTTOM, Effect, effect_of_interval, effect_product
from .loops import (Component, Loop, anchor_point, anchored_trace, components,
                    is_idempotent)
from .runs import Location, Run, zone_output
from .transducer import TwoWayTransducer


@dataclass(frozen=True)
class ForestNode:
    x1: int
    x2: int
    effect: Effect
    children: tuple["ForestNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def height(self) -> int:
        if self.is_leaf:
            return 1
        return 1 + max(c.height() for c in self.children)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


@dataclass(frozen=True)
class FactorizationForest:
    positions: tuple[int, ...]
    root: ForestNode

    def height(self) -> int:
        return self.root.height()


def build_forest(run: Run, positions: Sequence[int]) -> FactorizationForest:
    """Factorization forest for a position set of a run.

    Leaves join consecutive positions; layers alternate between merging
    maximal blocks of adjacent equal idempotent effects (wide nodes) and
    pairing neighbours (binary nodes).  Any height within the 3 * semigroup
    size bound is acceptable; this construction stays near log-depth plus
    one layer per idempotent regime.
    """
    xs = sorted(set(positions))
    if len(xs) < 2:
        raise ValueError("need at least two positions")
    layer = []
    for a, b in zip(xs, xs[1:]):
        eff = effect_of_interval(run, a, b)
        layer.append(ForestNode(a, b, eff))
    while len(layer) > 1:
        merged = _merge_idempotent(layer)
        if len(merged) == len(layer):
            merged = _merge_pairs(layer)
        layer = merged
    return FactorizationForest(tuple(xs), layer[0])


def _merge_idempotent(layer: list[ForestNode]) -> list[ForestNode]:
    out: list[ForestNode] = []
    i = 0
    while i < len(layer):
        j = i
        eff = layer[i].effect
        if effect_product(eff, eff) == eff:
            while j + 1 < len(layer) and layer[j + 1].effect == eff:
                j += 1
        if j > i:
            group = tuple(layer[i:j + 1])
            out.append(ForestNode(group[0].x1, group[-1].x2, eff, group))
            i = j + 1
        else:
            out.append(layer[i])
            i += 1
    return out


def _merge_pairs(layer: list[ForestNode]) -> list[ForestNode]:
    out: list[ForestNode] = []
    i = 0
    while i < len(layer):
        if i + 1 < len(layer):
            a, b = layer[i], layer[i + 1]
            eff = effect_product(a.effect, b.effect)
            if eff is BOTTOM:
                raise ValueError("bottom effect while building forest")
            out.append(ForestNode(a.x1, b.x2, eff, (a, b)))
            i += 2
        else:
            out.append(layer[i])
            i += 1
    return out


def validate_forest(forest: FactorizationForest, run: Run) -> bool:
    """Re-check partition, product law, idempotent rule and leaf adjacency."""
    xs = forest.positions
    leaves = [n for n in forest.root.walk() if n.is_leaf]
    leaves.sort(key=lambda n: n.x1)
    if [(n.x1, n.x2) for n in leaves] != list(zip(xs, xs[1:])):
        return False
    for node in forest.root.walk():
        if node.effect != effect_of_interval(run, node.x1, node.x2):
            return False
        if node.is_leaf:
            continue
        kids = node.children
        if kids[0].x1 != node.x1 or kids[-1].x2 != node.x2:
            return False
        if any(a.x2 != b.x1 for a, b in zip(kids, kids[1:])):
            return False
        prod = kids[0].effect
        for kid in kids[1:]:
            prod = effect_product(prod, kid.effect)
        if prod != node.effect:
            return False
        if len(kids) > 2:
            eff = node.effect
            if effect_product(eff, eff) != eff:
                return False
            if any(k.effect != eff for k in kids):
                return False
    return True


def emax(t: TwoWayTransducer) -> int:
    """Size bound of the effect semigroup: (2|Q|)^(2H) with H = 2|Q|-1."""
    h = t.height_bound
    return 4 ** h * len(t.states) ** h * len(t.states) ** h


def bound_b(t: TwoWayTransducer, mode: str = "general") -> int:
    """The output-period bound: cmax |Q|^H + 1 sweeping, or the general
    cmax H (2^(3 emax) + 4) + 4 cmax; exact big integers."""
    h = t.height_bound
    cmax = t.cmax
    if mode == "sweeping":
        return cmax * len(t.states) ** h + 1
    if mode == "general":
        return cmax * h * (2 ** (3 * emax(t)) + 4) + 4 * cmax
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class ExtractionResult:
    loop: Loop
    component: Component
    anchor: Location
    trace_output: tuple[str, ...]


def extract_idempotent_anchor(
    run: Run, interval: tuple[int, int], k_interval: tuple[Location, Location],
    bound: int,
) -> Optional[ExtractionResult]:
    """Idempotent loop with a producing anchor strictly inside the window.

    With Z the locations of [l1, l2] at positions within the interval, an
    induced output longer than the bound yields an idempotent loop strictly
    inside the interval whose anchor lies strictly between l1 and l2 and
    whose trace output is non-empty.  Searches the richest output level via
    a factorization forest, then exhaustively; None when the output stays
    within the bound.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    x1, x2 = interval
    l1, l2 = k_interval
    lo, hi = run.index(l1), run.index(l2)
    if lo > hi:
        raise ValueError("location interval out of run order")
    if len(zone_output(run, lo, hi, x1, x2)) <= bound:
        return None

    # Positions sourcing non-empty output per level; the window endpoints
    # and the border positions are excluded as in the extraction proof.
    by_level: dict[int, set[int]] = {}
    for i in range(lo, hi):
        a, b = run.locs[i], run.locs[i + 1]
        if not (x1 < a.pos < x2 and x1 < b.pos < x2):
            continue
        if a in (l1, l2) or b in (l1, l2):
            continue
        if run.trans[i].out:
            by_level.setdefault(a.level, set()).add(a.pos)
    candidates = sorted(by_level.items(),
                        key=lambda kv: (-len(kv[1]), kv[0]))
    for level, xs in candidates:
        found = _search_level(run, sorted(xs), level, (x1, x2), (lo, hi))
        if found is not None:
            return found
    return None


def _search_level(run: Run, xs: list[int], level: int,
                  interval: tuple[int, int],
                  bounds: tuple[int, int]) -> Optional[ExtractionResult]:
    if len(xs) < 2:
        return None
    effects: dict[tuple[int, int], Effect] = {}

    def eff(a: int, b: int) -> Effect:
        if (a, b) not in effects:
            effects[(a, b)] = effect_of_interval(run, a, b)
        return effects[(a, b)]

    pairs: list[tuple[int, int, int]] = []
    if len(xs) >= 3:
        forest = build_forest(run, xs)
        for node in forest.root.walk():
            for a, b in zip(node.children, node.children[1:]):
                e1, e2 = a.effect, b.effect
                if (e1 == e2 and effect_product(e1, e1) == e1
                        and effect_product(e1, e2) == e1):
                    pairs.append((a.x1, a.x2, b.x2))
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            for k in range(j + 1, len(xs)):
                a, b, c = xs[i], xs[j], xs[k]
                e1, e2 = eff(a, b), eff(b, c)
                if e1 == e2 and effect_product(e1, e1) == e1:
                    pairs.append((a, b, c))
    seen = set()
    for a, b, c in pairs:
        if (a, b, c) in seen:
            continue
        seen.add((a, b, c))
        result = _check_pair(run, a, b, c, level, interval, bounds)
        if result is not None:
            return result
    return None


def _check_pair(run: Run, a: int, b: int, c: int, level: int,
                interval: tuple[int, int],
                bounds: tuple[int, int]) -> Optional[ExtractionResult]:
    x1, x2 = interval
    lo, hi = bounds
    for loop in (Loop(a, b), Loop(b, c)):
        if not (x1 < loop.x1 and loop.x2 < x2):
            continue
        if not is_idempotent(run, loop):
            continue
        for comp in components(run, loop):
            if level not in comp.levels:
                continue
            anchor = anchor_point(loop, comp)
            idx = run.index(anchor)
            if not lo < idx < hi:
                continue
            trace = anchored_trace(run, loop, comp)
            if trace.output():
                return ExtractionResult(loop, comp, anchor, trace.output())
    return None
