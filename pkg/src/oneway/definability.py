"""Inversions, the periodicity property of their outputs, location classes,
and run decompositions into diagonals and blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .loops import (AnchoredTrace, Component, Loop, anchor_points,
                    anchored_trace, components, enumerate_loops,
                    is_idempotent)
from .runs import (Fragment, Location, Run, factor, words_up_to, zone_output)
from .transducer import TwoWayTransducer
from .words import almost_periodic_decompose, minimal_period

GENERAL = "general"
SWEEPING = "sweeping"


def is_output_minimal_factor(run: Run, l1: Location, l2: Location) -> bool:
    """Single-level factor whose strictly contained loops are silent there.

    Both endpoints must lie on one level; every loop strictly contained in
    the spanned position interval must produce empty output at that level.
    """
    if l1.level != l2.level:
        raise ValueError("output-minimal factors lie on a single level")
    frag = factor(run, l1, l2) if run.before(l1, l2) else factor(run, l2, l1)
    y = l1.level
    lo, hi = min(l1.pos, l2.pos), max(l1.pos, l2.pos)
    css = {x: run.crossing_sequence(x) for x in range(lo, hi + 1)}
    for a in range(lo, hi + 1):
        for b in range(a + 1, hi + 1):
            if (a, b) == (lo, hi) or css[a] != css[b]:
                continue
            for i in range(frag.start, frag.stop):
                src = run.locs[i]
                dst = run.locs[i + 1]
                if (src.level == y and run.trans[i].out
                        and min(src.pos, dst.pos) >= a
                        and max(src.pos, dst.pos) <= b
                        and a <= src.pos <= b):
                    return False
    return True


def is_output_minimal_pair(run: Run, loop: Loop, comp: Component) -> bool:
    """No strictly smaller idempotent loop has a producing factor inside
    one of this pair's factors."""
    own = _pair_factors(run, loop, comp)
    for small in enumerate_loops(run):
        if not (loop.x1 <= small.x1 and small.x2 <= loop.x2
                and (small.x1, small.x2) != (loop.x1, loop.x2)):
            continue
        if not is_idempotent(run, small):
            continue
        for comp2 in components(run, small):
            inner = _pair_factors(run, small, comp2)
            contained = any(
                f.start >= g.start and f.stop <= g.stop
                for f in inner for g in own)
            if contained and anchored_trace(run, small, comp2).output():
                return False
    return True


def _pair_factors(run: Run, loop: Loop, comp: Component) -> list[Fragment]:
    from .runs import intercepted_factors
    out = []
    for _, frag in intercepted_factors(run, loop.x1, loop.x2):
        if (frag.first.level, frag.last.level) in _edges_of(comp):
            out.append(frag)
    return out


def _edges_of(comp: Component) -> set[tuple[int, int]]:
    cyc = comp.cycle
    return {(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))}


@dataclass(frozen=True)
class Inversion:
    loop1: Loop
    anchor1: Location
    loop2: Loop
    anchor2: Location
    out1: tuple[str, ...]
    out2: tuple[str, ...]


def enumerate_inversions(run: Run, mode: str = GENERAL) -> list[Inversion]:
    """All inversions: idempotent-loop anchors ordered oppositely in run
    order and position order, with non-empty trace outputs.

    Sweeping mode additionally requires both traces to be single-level
    output-minimal factors.
    """
    anchors: list[tuple[Location, Loop, Component, tuple[str, ...]]] = []
    for loop in enumerate_loops(run):
        if not is_idempotent(run, loop):
            continue
        for anchor, comp in anchor_points(run, loop):
            trace = anchored_trace(run, loop, comp)
            out = trace.output()
            if not out:
                continue
            if mode == SWEEPING:
                pieces = trace.pieces
                if len(pieces) != 1:
                    continue
                frag = pieces[0]
                if frag.first.level != frag.last.level:
                    continue
                if not is_output_minimal_factor(run, frag.first, frag.last):
                    continue
            anchors.append((anchor, loop, comp, out))
    result = []
    for a1, loop1, _, out1 in anchors:
        for a2, loop2, _, out2 in anchors:
            if run.index(a1) < run.index(a2) and a1.pos > a2.pos:
                result.append(Inversion(loop1, a1, loop2, a2, out1, out2))
    result.sort(key=lambda inv: (run.index(inv.anchor1), run.index(inv.anchor2),
                                 inv.loop1.x1, inv.loop1.x2,
                                 inv.loop2.x1, inv.loop2.x2))
    return result


def inversion_word(run: Run, inv: Inversion) -> tuple[str, ...]:
    """out(tr l1) out(rho[l1, l2]) out(tr l2): the word property P2 bounds."""
    middle = factor(run, inv.anchor1, inv.anchor2).output()
    return inv.out1 + middle + inv.out2


@dataclass(frozen=True)
class P2Violation:
    inversion: Inversion
    word: tuple[str, ...]
    period: int
    gcd_traces: int
    divisibility: bool  # True when the b-independent divisibility test failed


def check_p2(run: Run, b: int, mode: str = GENERAL) -> Optional[P2Violation]:
    """First inversion whose output period breaks the periodicity property.

    The period of the inversion word must divide both trace-output lengths
    (a b-independent test; failure certifies non-definability) and must not
    exceed b.
    """
    if b < 1:
        raise ValueError("bound must be >= 1")
    for inv in enumerate_inversions(run, mode):
        w = inversion_word(run, inv)
        p = minimal_period(w)
        g = math.gcd(len(inv.out1), len(inv.out2))
        if g % p != 0:
            return P2Violation(inv, w, p, g, True)
        if p > b:
            return P2Violation(inv, w, p, g, False)
    return None


@dataclass(frozen=True)
class SimClass:
    """A non-singleton class of the overlap closure of inversions."""

    first: Location
    last: Location
    anchor_set: tuple[Location, ...]
    position_span: tuple[int, ...]
    extended_first: Location
    extended_last: Location


def sim_classes(run: Run, mode: str = GENERAL) -> list[SimClass]:
    """Non-singleton classes of ~ (overlap closure of inversion intervals),
    with anchor sets, position spans and extended block endpoints."""
    invs = enumerate_inversions(run, mode)
    if not invs:
        return []
    intervals = [(run.index(i.anchor1), run.index(i.anchor2), i)
                 for i in invs]
    intervals.sort(key=lambda t: (t[0], t[1]))
    merged: list[list] = []
    for lo, hi, inv in intervals:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
            merged[-1][2].append(inv)
        else:
            merged.append([lo, hi, [inv]])
    out = []
    for lo, hi, invs_here in merged:
        anchors = sorted(
            {run.index(i.anchor1) for i in invs_here}
            | {run.index(i.anchor2) for i in invs_here})
        anchor_locs = tuple(run.locs[i] for i in anchors)
        span = tuple(sorted({loc.pos for loc in anchor_locs}))
        xmin, xmax = span[0], span[-1]
        ext_first = None
        for i in range(lo, -1, -1):
            if run.locs[i].pos == xmin:
                ext_first = run.locs[i]
                break
        ext_last = None
        for i in range(hi, len(run.locs)):
            if run.locs[i].pos == xmax:
                ext_last = run.locs[i]
                break
        assert ext_first is not None and ext_last is not None
        out.append(SimClass(run.locs[lo], run.locs[hi], anchor_locs, span,
                            ext_first, ext_last))
    return out


@dataclass(frozen=True)
class DecompositionPiece:
    kind: str  # 'diagonal' or 'block'
    first: Location
    last: Location
    evidence: tuple = ()


@dataclass(frozen=True)
class Decomposition:
    run: Run
    bound: int
    mode: str
    pieces: tuple[DecompositionPiece, ...]


def _diagonal_witnesses_general(
    run: Run, lo: int, hi: int, b: int,
) -> Optional[dict[int, Location]]:
    """Per-position witness locations for the two-way diagonal condition."""
    l1, l2 = run.locs[lo], run.locs[hi]
    x, xp = l1.pos, l2.pos
    if x > xp:
        return None
    witnesses: dict[int, Location] = {}
    for z in range(x, xp + 1):
        found = None
        for i in range(lo, hi + 1):
            loc = run.locs[i]
            if loc.pos != z:
                continue
            up_left = zone_output(run, i, hi, 0, z)
            down_right = zone_output(run, lo, i, z, run.omega)
            if len(up_left) <= b and len(down_right) <= b:
                found = loc
                break
        if found is None:
            return None
        witnesses[z] = found
    return witnesses


def _diagonal_chain_sweeping(
    run: Run, lo: int, hi: int, b: int, height_bound: int,
) -> Optional[tuple[Location, ...]]:
    """Floor decomposition of a sweeping diagonal.

    Searches for boundary locations l_0 .. l_{2n+1} alternating gaps
    (output at most 2 H b, endpoint positions non-decreasing) and floors
    (factors on a single even level); returns the boundary chain or None.
    """
    budget = 2 * height_bound * b
    prefix = [0]
    for t in run.trans:
        prefix.append(prefix[-1] + len(t.out))

    def gap_out(i: int, j: int) -> int:
        return prefix[j] - prefix[i]

    memo: dict[int, Optional[tuple[Location, ...]]] = {}

    def reach(g: int) -> Optional[tuple[Location, ...]]:
        # Chain from a gap starting at location index g up to hi.
        if g in memo:
            return memo[g]
        memo[g] = None  # guards against cycles; indices only grow
        if (gap_out(g, hi) <= budget
                and run.locs[hi].pos >= run.locs[g].pos):
            memo[g] = (run.locs[g], run.locs[hi])
            return memo[g]
        for j in range(g, hi + 1):
            if gap_out(g, j) > budget:
                break
            start = run.locs[j]
            if start.level % 2 or start.pos < run.locs[g].pos:
                continue
            k = j
            while k + 1 <= hi and run.locs[k + 1].level == start.level:
                k += 1
            # Try every floor end, longest first (larger strides first).
            for end in range(k, j - 1, -1):
                if end == g == j:
                    continue  # an empty floor at the gap start loops forever
                tail = reach(end)
                if tail is not None:
                    memo[g] = (run.locs[g], start) + tail
                    return memo[g]
        return memo[g]

    return reach(lo)


def _verify_block(run: Run, lo: int, hi: int, b: int, mode: str,
                  height_bound: int) -> Optional[tuple]:
    l1, l2 = run.locs[lo], run.locs[hi]
    x, xp = l1.pos, l2.pos
    if x > xp:
        return None
    out = tuple(factor(run, l1, l2).output())
    if mode == GENERAL:
        ap = almost_periodic_decompose(out, b)
        if ap is None:
            return None
        left = zone_output(run, lo, hi, 0, x)
        right = zone_output(run, lo, hi, xp, run.omega)
        if len(left) > b or len(right) > b:
            return None
        return (ap, left, right)
    ap = almost_periodic_decompose(out, 2 * b)
    if ap is None:
        return None
    y, yp = sorted((l1.level, l2.level))

    def inside(loc: Location) -> bool:
        return x <= loc.pos <= xp and y <= loc.level <= yp

    outside: list[str] = []
    for i in range(lo, hi):
        if not (inside(run.locs[i]) and inside(run.locs[i + 1])):
            outside.extend(run.trans[i].out)
    if len(outside) > 2 * height_bound * b:
        return None
    return (ap, tuple(outside))


def find_decomposition(
    t: TwoWayTransducer, run: Run, b: int, mode: str = GENERAL,
) -> Optional[Decomposition]:
    """Build and verify a b-decomposition: blocks from the extended
    inversion classes, diagonals in between; None when verification fails.
    """
    if b < 1:
        raise ValueError("bound must be >= 1")
    classes = sim_classes(run, mode)
    blocks: list[tuple[int, int]] = []
    for cls in classes:
        lo = run.index(cls.extended_first)
        hi = run.index(cls.extended_last)
        blocks.append((lo, hi))
    blocks.sort()
    for (a1, b1), (a2, b2) in zip(blocks, blocks[1:]):
        if a2 <= b1:  # overlapping extended blocks: construction failed
            return None
        if run.locs[b1].pos > run.locs[a2].pos:
            return None
    pieces: list[DecompositionPiece] = []
    cursor = 0
    bounds = blocks + [(len(run.locs) - 1, None)]
    for lo, hi in bounds:
        if cursor < lo:
            piece = _make_diagonal(t, run, cursor, lo, b, mode)
            if piece is None:
                return None
            pieces.append(piece)
        if hi is None:
            break
        ev = _verify_block(run, lo, hi, b, mode, t.height_bound)
        if ev is None:
            return None
        pieces.append(DecompositionPiece(
            "block", run.locs[lo], run.locs[hi], ev))
        cursor = hi
    return Decomposition(run, b, mode, tuple(pieces))


def _make_diagonal(t: TwoWayTransducer, run: Run, lo: int, hi: int,
                   b: int, mode: str) -> Optional[DecompositionPiece]:
    if run.locs[lo].pos > run.locs[hi].pos:
        return None
    if mode == GENERAL:
        wit = _diagonal_witnesses_general(run, lo, hi, b)
        if wit is None:
            return None
        return DecompositionPiece(
            "diagonal", run.locs[lo], run.locs[hi],
            tuple(sorted(wit.items())))
    chain = _diagonal_chain_sweeping(run, lo, hi, b, t.height_bound)
    if chain is None:
        return None
    return DecompositionPiece("diagonal", run.locs[lo], run.locs[hi], chain)


def verify_decomposition(
    t: TwoWayTransducer, run: Run, d: Decomposition, b: int,
    mode: str = GENERAL,
) -> bool:
    """Re-check a decomposition from the raw piece definitions."""
    if not d.pieces:
        return len(run.trans) == 0
    if d.pieces[0].first != run.locs[0]:
        return False
    if d.pieces[-1].last != run.locs[-1]:
        return False
    for p, q in zip(d.pieces, d.pieces[1:]):
        if p.last != q.first:
            return False
    for piece in d.pieces:
        lo, hi = run.index(piece.first), run.index(piece.last)
        if lo > hi or piece.first.pos > piece.last.pos:
            return False
        if piece.kind == "diagonal":
            if mode == GENERAL:
                if _diagonal_witnesses_general(run, lo, hi, b) is None:
                    return False
            else:
                if _diagonal_chain_sweeping(run, lo, hi, b,
                                            t.height_bound) is None:
                    return False
        elif piece.kind == "block":
            if _verify_block(run, lo, hi, b, mode, t.height_bound) is None:
                return False
        else:
            return False
    return True
