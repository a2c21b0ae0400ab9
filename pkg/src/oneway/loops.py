"""Loops of runs: idempotency, components, anchor points, traces, pumping.

A loop is an interval with equal border crossing sequences.  Pumping
replicates the loop's input factor and braids the intercepted factors into
a new valid run; for idempotent loops the pumped run factorizes through
the traces of the component anchor points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .flows import BOTTOM, Effect, effect_of_interval, effect_product
from .runs import Fragment, Location, Run, intercepted_factors, read_index, replay
from .transducer import LEFT_MARK, RIGHT_MARK, Transition, TwoWayTransducer


@dataclass(frozen=True)
class Loop:
    x1: int
    x2: int

    def __post_init__(self):
        if not 0 <= self.x1 < self.x2:
            raise ValueError("loop needs 0 <= x1 < x2")

    @property
    def width(self) -> int:
        return self.x2 - self.x1


def is_loop(run: Run, x1: int, x2: int) -> bool:
    return (0 <= x1 < x2 <= run.omega
            and run.crossing_sequence(x1) == run.crossing_sequence(x2))


def enumerate_loops(run: Run) -> list[Loop]:
    """All intervals with equal border crossing sequences, by (x1, x2)."""
    css = [run.crossing_sequence(x) for x in range(run.omega + 1)]
    out = []
    for x1 in range(run.omega + 1):
        for x2 in range(x1 + 1, run.omega + 1):
            if css[x1] == css[x2]:
                out.append(Loop(x1, x2))
    return out


def loop_effect(run: Run, loop: Loop) -> Effect:
    return effect_of_interval(run, loop.x1, loop.x2)


def is_idempotent(run: Run, loop: Loop) -> bool:
    e = loop_effect(run, loop)
    return effect_product(e, e) == e


@dataclass(frozen=True)
class Component:
    """A cycle of a loop's flow; its levels form an interval."""

    cycle: tuple[int, ...]  # nodes in cycle order starting at max(C)

    @property
    def levels(self) -> frozenset[int]:
        return frozenset(self.cycle)

    @property
    def min_level(self) -> int:
        return min(self.cycle)

    @property
    def max_level(self) -> int:
        return max(self.cycle)

    @property
    def left_to_right(self) -> bool:
        return self.min_level % 2 == 0


def components(run: Run, loop: Loop) -> list[Component]:
    """Cycles of the loop's flow, ordered by minimum level.

    The flow of a loop is a permutation of the levels (every node has
    in- and out-degree one), so its strongly connected components are its
    cycles; each cycle is reported starting at its maximum level.
    """
    flow = effect_of_interval(run, loop.x1, loop.x2).flow
    succ: dict[int, int] = {}
    for y, z in flow.edges():
        succ[y] = z
    seen: set[int] = set()
    cycles = []
    for start in range(flow.nodes):
        if start in seen or start not in succ:
            continue
        cyc = [start]
        seen.add(start)
        node = succ[start]
        while node != start:
            cyc.append(node)
            seen.add(node)
            node = succ[node]
        top = max(cyc)
        i = cyc.index(top)
        cycles.append(Component(tuple(cyc[i:] + cyc[:i])))
    cycles.sort(key=lambda c: c.min_level)
    return cycles


def anchor_point(loop: Loop, comp: Component) -> Location:
    """Anchor of a component: (x1, max C) left-to-right, else (x2, max C)."""
    x = loop.x1 if comp.left_to_right else loop.x2
    return Location(x, comp.max_level)


@dataclass(frozen=True)
class AnchoredTrace:
    loop: Loop
    component: Component
    anchor: Location
    pieces: tuple[Fragment, ...]  # intercepted factors in cycle order

    def transitions(self) -> tuple[Transition, ...]:
        out: list[Transition] = []
        for frag in self.pieces:
            out.extend(frag.trans)
        return tuple(out)

    def output(self) -> tuple[str, ...]:
        out: list[str] = []
        for frag in self.pieces:
            out.extend(frag.output())
        return tuple(out)


def anchored_trace(run: Run, loop: Loop, comp: Component) -> AnchoredTrace:
    """Trace of a component's anchor: its factors glued along the cycle.

    Defined for idempotent loops only; the factors are concatenated
    starting from the edge out of max(C), which is the order in which they
    repeat when the loop is pumped.
    """
    if not is_idempotent(run, loop):
        raise ValueError("trace undefined: loop is not idempotent")
    by_edge: dict[tuple[int, int], Fragment] = {}
    for _, frag in intercepted_factors(run, loop.x1, loop.x2):
        by_edge[(frag.first.level, frag.last.level)] = frag
    pieces = []
    cyc = comp.cycle
    for i, y in enumerate(cyc):
        z = cyc[(i + 1) % len(cyc)]
        pieces.append(by_edge[(y, z)])
    return AnchoredTrace(loop, comp, anchor_point(loop, comp), tuple(pieces))


def anchor_points(run: Run, loop: Loop) -> list[tuple[Location, Component]]:
    """Anchor points of an idempotent loop with their components, run order."""
    pairs = [(anchor_point(loop, c), c) for c in components(run, loop)]
    pairs.sort(key=lambda pc: run.index(pc[0]))
    return pairs


def pump(t: TwoWayTransducer, run: Run, loop: Loop, n: int) -> tuple[tuple[str, ...], Run]:
    """Pump a loop to n total copies (n=1 returns the run unchanged).

    Works for arbitrary loops by walking the pumped word while consulting
    the original run: crossing sequences agree at every copy boundary, so
    the transition taken at a pumped location is the one the original run
    takes at the corresponding original location.  Returns the inner
    pumped word together with the pumped run.
    """
    if n < 1:
        raise ValueError("need n >= 1 total copies")
    if not is_loop(run, loop.x1, loop.x2):
        raise ValueError("not a loop of this run")
    word = run.word
    omega = run.omega
    if loop.x1 == 0 or loop.x2 == omega:
        raise ValueError("cannot pump a loop touching the endmarkers")
    if n == 1:
        return tuple(word[1:-1]), run
    x1, x2 = loop.x1, loop.x2
    w = loop.width
    pumped = word[:x2] + word[x1:x2] * (n - 1) + word[x2:]
    shift = (n - 1) * w
    top = x1 + n * w  # last copy boundary in the pumped word

    outgoing: dict[Location, Transition] = {
        run.locs[i]: run.trans[i] for i in range(len(run.trans))}
    final_loc = run.locs[-1]

    def original(loc: Location) -> Location:
        p, lvl = loc
        if p < x1:
            return Location(p, lvl)
        if p > top:
            return Location(p - shift, lvl)
        off = (p - x1) % w
        if off == 0:  # copy boundary: pick the border matching the read side
            if lvl % 2 == 0:
                return Location(x1 if p < top else x2, lvl)
            return Location(x2 if p > x1 else x1, lvl)
        return Location(x1 + off, lvl)

    visits = {0: 1}
    locs = [Location(0, 0)]
    states = [run.states[0]]
    trans: list[Transition] = []
    budget = len(run.trans) * n + 1
    while True:
        cur = locs[-1]
        orig = original(cur)
        if orig == final_loc:
            break
        tr = outgoing.get(orig)
        if tr is None:
            raise AssertionError("pump walk left the original run")
        if tr.src != states[-1]:
            raise AssertionError("pump walk state mismatch")
        idx = read_index(cur)
        assert pumped[idx - 1] == tr.read, "pump walk symbol mismatch"
        if cur.level % 2 == 0:
            new_pos = cur.pos + 1 if tr.direction == "R" else cur.pos
        else:
            new_pos = cur.pos if tr.direction == "R" else cur.pos - 1
        nxt = Location(new_pos, visits.get(new_pos, 0))
        visits[new_pos] = visits.get(new_pos, 0) + 1
        locs.append(nxt)
        states.append(tr.dst)
        trans.append(tr)
        budget -= 1
        if budget < 0:
            raise AssertionError("pump walk did not terminate")
    pumped_run = Run(pumped, states, locs, trans,
                     accepts=(locs[-1].pos == len(pumped)
                              and states[-1] in t.final))
    return tuple(pumped[1:-1]), pumped_run


def pumped_factorization(
    run: Run, loop: Loop, n: int,
) -> Optional[tuple[Transition, ...]]:
    """Transition sequence rho0 tr1^(n-1) rho1 ... trk^(n-1) rhok.

    The idempotent-pumping law predicts this equals the transitions of
    pump(run, loop, n); None when the loop is not idempotent.
    """
    if not is_idempotent(run, loop):
        return None
    anchors = anchor_points(run, loop)
    traces = [anchored_trace(run, loop, c) for _, c in anchors]
    cuts = [run.index(loc) for loc, _ in anchors]
    out: list[Transition] = []
    prev = 0
    for cut, tr in zip(cuts, traces):
        out.extend(run.trans[prev:cut])
        out.extend(tr.transitions() * (n - 1))
        prev = cut
    out.extend(run.trans[prev:])
    return tuple(out)
