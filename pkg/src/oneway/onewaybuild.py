"""Construction of a one-way transducer simulating decomposable runs.

The one-way machine scans the padded input once, guessing a successful run
of the two-way machine via crossing sequences and per-segment transition
diagrams, together with a decomposition of that run into diagonals and
blocks.  It emits the run's output in input order:

* inside a diagonal, an emission frontier walks along the guessed run;
  outputs of already-scanned factors that the frontier has not reached yet
  wait in `stored` registers (one per left excursion of the current cut),
  while outputs the frontier needs before their input has been scanned are
  guessed, emitted, and parked in `claims` registers (one per right
  excursion) for later verification;
* inside a block, output is emitted by length from a lazily-discovered
  almost-periodic pattern (bounded prefix, period window, bounded suffix),
  while every scanned transition of the block checks its output against
  the pattern at its run-order offset, carried per level as an offset tag.

All registers are bounded, so the state space is finite; exploration is
budgeted and the result is trimmed to co-accessible states.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Sequence

from .transducer import TwoWayTransducer, make_transducer

Word = tuple[str, ...]
Tag = tuple[str, int]  # ('A' | 'B' | 'C', index)


class ResourceBudgetError(RuntimeError):
    """State budget exceeded while exploring the one-way construction."""


# ---------------------------------------------------------------------------
# Almost-periodic patterns with lazily filled slots


END: Tag = ("E", 0)


@dataclass(frozen=True)
class Pattern:
    """Output shape w1 v^* w3; None slots are not yet pinned.

    Offsets within the prefix w1 are absolute ('A', i with i < a_len);
    offsets within the periodic part are taken modulo p ('B', i); offsets
    within the suffix w3 are indexed by their distance from the END of the
    block output ('C', j, consumed towards ('C', 0)), so a verification
    chain reaching the block's final location certifies them.  Seams into
    the periodic part and into the suffix are nondeterministic choices.
    """

    p: int
    a_len: int
    c_len: int
    a: tuple[Optional[str], ...] = ()
    win: tuple[Optional[str], ...] = ()
    c: tuple[Optional[str], ...] = ()

    def __post_init__(self):
        if len(self.a) != self.a_len:
            object.__setattr__(self, "a", (None,) * self.a_len)
        if len(self.win) != self.p:
            object.__setattr__(self, "win", (None,) * self.p)
        if len(self.c) != self.c_len:
            object.__setattr__(self, "c", (None,) * self.c_len)

    def slot(self, tag: Tag) -> Optional[str]:
        region, i = tag
        buf = {"A": self.a, "B": self.win, "C": self.c}[region]
        return buf[i]

    def fill(self, tag: Tag, sym: str) -> "Pattern":
        region, i = tag
        buf = {"A": self.a, "B": self.win, "C": self.c}[region]
        buf = buf[:i] + (sym,) + buf[i + 1:]
        if region == "A":
            return replace(self, a=buf)
        if region == "B":
            return replace(self, win=buf)
        return replace(self, c=buf)

    def readable(self, tag: Tag) -> bool:
        region, i = tag
        if region == "A":
            return 0 <= i < self.a_len
        if region == "B":
            return 0 <= i < self.p
        if region == "C":
            return 0 <= i < self.c_len
        return False

    def _c_entry(self) -> list[Tag]:
        # The suffix is entered at its first symbol, whose distance from
        # the end of the block output is c_len - 1.
        return [("C", self.c_len - 1)] if self.c_len else [END]

    def next_tags(self, tag: Tag) -> list[Tag]:
        """Successor positions after consuming the symbol at `tag`."""
        region, i = tag
        if region == "A":
            if i + 1 < self.a_len:
                return [("A", i + 1)]
            return ([("B", 0)] if self.p else []) + self._c_entry()
        if region == "B":
            return [("B", (i + 1) % self.p)] + self._c_entry()
        if region == "C":
            return [("C", i - 1)] if i > 0 else [END]
        return []

    def start_tags(self) -> list[Tag]:
        """Representations of offset zero of the block output."""
        if self.a_len:
            return [("A", 0)]
        if self.p:
            return [("B", 0)] + self._c_entry()
        return self._c_entry()

    def guessable_tags(self) -> list[Tag]:
        out = [("A", i) for i in range(self.a_len)]
        out += [("B", i) for i in range(self.p)]
        out += [("C", i) for i in range(self.c_len)]
        out.append(END)
        return out


def tag_consume(pat: Pattern, tag: Tag, word: Sequence[str]
                ) -> list[tuple[Pattern, Tag]]:
    """All ways to check `word` against the pattern starting at `tag`."""
    results = [(pat, tag)]
    for sym in word:
        nxt = []
        for p, t in results:
            if not p.readable(t):
                continue
            cur = p.slot(t)
            if cur is None:
                p2 = p.fill(t, sym)
            elif cur == sym:
                p2 = p
            else:
                continue
            for t2 in p2.next_tags(t):
                nxt.append((p2, t2))
        results = _dedup(nxt)
        if not results:
            break
    return results


def tag_emit(pat: Pattern, tag: Tag, count: int, alphabet: Sequence[str]
             ) -> list[tuple[Pattern, Tag, Word]]:
    """All ways to emit `count` pattern symbols from `tag`, branching over
    the alphabet when a slot is still unknown."""
    results: list[tuple[Pattern, Tag, Word]] = [(pat, tag, ())]
    for _ in range(count):
        nxt = []
        for p, t, out in results:
            if not p.readable(t):
                continue
            cur = p.slot(t)
            options = [cur] if cur is not None else list(alphabet)
            for sym in options:
                p2 = p if cur is not None else p.fill(t, sym)
                for t2 in p2.next_tags(t):
                    nxt.append((p2, t2, out + (sym,)))
        results = _dedup(nxt)
        if not results:
            break
    return results


def _dedup(items: list) -> list:
    seen = set()
    out = []
    for it in items:
        if it not in seen:
            seen.add(it)
            out.append(it)
    return out


# ---------------------------------------------------------------------------
# Builder states


@dataclass(frozen=True)
class BlockState:
    ylo: int
    yhi: int
    tags: tuple[Tag, ...]  # offset tags of levels ylo..yhi
    pat: Pattern
    ptr: Tag


@dataclass(frozen=True)
class BuilderState:
    cs: tuple[str, ...]
    kind: str  # 'D' or 'B'
    fy: int    # diagonal frontier level (kind 'D'; -1 for blocks)
    block: Optional[BlockState]
    stored: tuple[tuple[int, Word], ...]  # left gap -> pending known output
    claims: tuple[tuple[int, Word], ...]  # right gap -> emitted guess

    def sort_key(self):
        return repr(self)


@dataclass(frozen=True)
class BuildParams:
    pattern_side: int   # cap for pattern prefix/suffix lengths
    period: int         # cap for the pattern period
    register: int       # cap for stored words
    claim: int          # cap for guessed claim words
    max_events: int = 2
    state_budget: int = 20000
    diagram_budget: int = 4000


# ---------------------------------------------------------------------------
# Segment diagrams and their run-order walks


def _diagrams(t: TwoWayTransducer, cs: tuple[str, ...], sym: str,
              height_cap: int, budget: int):
    """Planar matchings of the levels of `cs` with a new crossing sequence,
    labeled by transitions reading `sym`.

    Yields (cs_right, left_item, right_item) with
    left_item[i] = ('R', j, tr) | ('L', tr) for even i and
    right_item[j] = ('L', i, tr) | ('R', tr) for odd j.
    """
    h = len(cs)
    moves_r: dict[str, list] = {}
    moves_l: dict[str, list] = {}
    turns_l: dict[tuple[str, str], list] = {}
    turns_r: list = []
    for tr in sorted(t.transitions):
        if tr.read != sym:
            continue
        if tr.direction == "R":
            moves_r.setdefault(tr.src, []).append(tr)
            turns_r.append(tr)
        else:
            moves_l.setdefault(tr.dst, []).append(tr)
            turns_l.setdefault((tr.src, tr.dst), []).append(tr)
    results: list = []

    def rec(i, j, csr, litem, ritem, seen):
        if len(results) >= budget:
            raise ResourceBudgetError("diagram budget exceeded")
        if i == h:
            results.append((tuple(csr), dict(litem), dict(ritem)))
            # The new crossing sequence may still grow by turns at the
            # right border above the last crossing.
            if len(csr) + 2 <= height_cap:
                for tr in turns_r:
                    key1 = (tr.src, j % 2)
                    key2 = (tr.dst, (j + 1) % 2)
                    if key1 in seen or key2 in seen:
                        continue
                    csr.append(tr.src)
                    csr.append(tr.dst)
                    ritem[j] = ("R", tr)
                    rec(i, j + 2, csr, litem, ritem, seen | {key1, key2})
                    del ritem[j]
                    csr.pop()
                    csr.pop()
            return
        if i % 2 == 0:
            if i + 1 < h:
                for tr in turns_l.get((cs[i], cs[i + 1]), ()):
                    litem[i] = ("L", tr)
                    rec(i + 2, j, csr, litem, ritem, seen)
                    del litem[i]
            for tr in moves_r.get(cs[i], ()):
                key = (tr.dst, j % 2)
                if key in seen or len(csr) + 1 > height_cap:
                    continue
                csr.append(tr.dst)
                litem[i] = ("R", j, tr)
                rec(i + 1, j + 1, csr, litem, ritem, seen | {key})
                del litem[i]
                csr.pop()
        else:
            for tr in moves_l.get(cs[i], ()):
                key = (tr.src, j % 2)
                if key in seen or len(csr) + 1 > height_cap:
                    continue
                csr.append(tr.src)
                ritem[j] = ("L", i, tr)
                rec(i + 1, j + 1, csr, litem, ritem, seen | {key})
                del ritem[j]
                csr.pop()
            if len(csr) + 2 <= height_cap:
                for tr in turns_r:
                    key1 = (tr.src, j % 2)
                    key2 = (tr.dst, (j + 1) % 2)
                    if key1 in seen or key2 in seen:
                        continue
                    csr.append(tr.src)
                    csr.append(tr.dst)
                    ritem[j] = ("R", tr)
                    rec(i, j + 2, csr, litem, ritem, seen | {key1, key2})
                    del ritem[j]
                    csr.pop()
                    csr.pop()

    rec(0, 0, [], {}, {}, frozenset())
    return results


def _walk(h: int, hr: int, litem: dict, ritem: dict):
    """Linearize a diagram into run order.

    Items: ('L', y) / ('R', y) level markers, ('T', tr) transitions,
    ('LG', o) old left gaps, ('RG', e) new right gaps.  Returns None when
    the diagram does not visit the levels in increasing order.
    """
    items: list = []
    side, lvl = "L", 0
    next_l = next_r = 0
    while True:
        if side == "L":
            if lvl != next_l:
                return None
            items.append(("L", lvl))
            next_l += 1
            if lvl % 2 == 1:
                items.append(("LG", lvl))
                lvl += 1
                continue
            item = litem.get(lvl)
            if item is None:
                return None
            if item[0] == "L":
                items.append(("T", item[1]))
                lvl += 1
                continue
            items.append(("T", item[2]))
            side, lvl = "R", item[1]
        else:
            if lvl != next_r:
                return None
            items.append(("R", lvl))
            next_r += 1
            if lvl % 2 == 0:
                if lvl == hr - 1:
                    break
                items.append(("RG", lvl))
                lvl += 1
                continue
            item = ritem.get(lvl)
            if item is None:
                return None
            if item[0] == "R":
                items.append(("T", item[1]))
                lvl += 1
                continue
            items.append(("T", item[2]))
            side, lvl = "L", item[1]
    if next_l != h or next_r != hr:
        return None
    return items


def words_up_to_len(alphabet: Sequence[str], n: int) -> list[Word]:
    out: list[Word] = [()]
    layer: list[Word] = [()]
    for _ in range(n):
        layer = [w + (a,) for w in layer for a in alphabet]
        out.extend(layer)
    return out


# ---------------------------------------------------------------------------
# Successor computation


class _Ctx:
    """Mutable walk context; branches deep-copy the pieces they change."""

    __slots__ = ("emitted", "old_stored", "new_stored", "old_claims",
                 "new_claims", "active", "acc_key", "acc",
                 "pat", "ptr", "cur_tag", "new_tags", "phase")

    def __init__(self, **kw):
        for name in self.__slots__:
            setattr(self, name, kw.get(name))

    def copy(self) -> "_Ctx":
        c = _Ctx()
        c.emitted = self.emitted
        c.old_stored = dict(self.old_stored)
        c.new_stored = dict(self.new_stored)
        c.old_claims = dict(self.old_claims)
        c.new_claims = dict(self.new_claims)
        c.active = None if self.active is None else list(self.active)
        c.acc_key = self.acc_key
        c.acc = None if self.acc is None else list(self.acc)
        c.pat = self.pat
        c.ptr = self.ptr
        c.cur_tag = self.cur_tag
        c.new_tags = dict(self.new_tags) if self.new_tags is not None else None
        c.phase = self.phase
        return c


class _SuccessorFinder:
    """Labeled successors of a builder state on one input symbol."""

    def __init__(self, t: TwoWayTransducer, params: BuildParams):
        self.t = t
        self.params = params
        self.alphabet = tuple(sorted(t.output_alphabet))
        self.height_cap = t.height_bound
        self._claim_words = words_up_to_len(self.alphabet, params.claim)
        self._walk_cache: dict = {}
        self._open_cache: dict = {}

    def _walks(self, cs: tuple[str, ...], sym: str):
        key = (cs, sym)
        if key not in self._walk_cache:
            walks = []
            for csr, litem, ritem in _diagrams(self.t, cs, sym,
                                               self.height_cap,
                                               self.params.diagram_budget):
                walk = _walk(len(cs), len(csr), litem, ritem)
                if walk is not None:
                    walks.append((csr, walk))
            self._walk_cache[key] = walks
        return self._walk_cache[key]

    def successors(self, state: BuilderState, sym: str
                   ) -> list[tuple[Word, BuilderState]]:
        raw: set[tuple[Word, BuilderState]] = set()
        for csr, walk in self._walks(state.cs, sym):
            raw.update(self._process(state, csr, walk))
        found: set[tuple[Word, BuilderState]] = set()
        for out, nxt in raw:
            found.update(self._with_events(out, nxt))
        return sorted(found, key=lambda on: (on[0], on[1].sort_key()))

    # -- walk processing --------------------------------------------------

    def _process(self, state, csr, walk):
        if state.kind == "D":
            for fy2 in range(len(csr)):
                yield from self._run_diag(state, csr, walk, fy2)
        else:
            for ylo2 in range(len(csr)):
                for yhi2 in range(ylo2, len(csr)):
                    yield from self._run_block(state, csr, walk, ylo2, yhi2)

    def _base_ctx(self, state) -> _Ctx:
        return _Ctx(emitted=(), old_stored=dict(state.stored),
                    new_stored={}, old_claims=dict(state.claims),
                    new_claims={}, active=None, acc_key=None, acc=None,
                    pat=None, ptr=None, cur_tag=None, new_tags=None, phase=0)

    def _run_diag(self, state, csr, walk, fy2):
        par = self.params

        def go(idx, ctx):
            while idx < len(walk):
                kind, *args = walk[idx]
                if kind == "L":
                    y = args[0]
                    if ctx.phase == 0 and ctx.active is not None:
                        if ctx.active:
                            return
                        ctx.active = None
                    if ctx.phase == 0 and y == state.fy:
                        ctx.phase = 1
                    if ctx.phase == 0 and y % 2 == 0:
                        if y not in ctx.old_claims:
                            return
                        ctx.active = list(ctx.old_claims.pop(y))
                elif kind == "R":
                    y = args[0]
                    if (ctx.phase == 2 and ctx.acc is not None
                            and y == ctx.acc_key + 1):
                        word = tuple(ctx.acc)
                        if len(word) > par.register:
                            return
                        ctx.new_stored[ctx.acc_key] = word
                        ctx.acc_key, ctx.acc = None, None
                    if ctx.phase == 1 and y == fy2:
                        ctx.phase = 2
                    if ctx.phase == 2 and y % 2 == 1 and ctx.acc is None:
                        ctx.acc_key, ctx.acc = y, []
                elif kind == "T":
                    out = args[0].out
                    if ctx.phase == 0:
                        if ctx.active is None:
                            return
                        if tuple(ctx.active[:len(out)]) != out:
                            return
                        del ctx.active[:len(out)]
                    elif ctx.phase == 1:
                        ctx.emitted = ctx.emitted + out
                    else:
                        if ctx.acc is None:
                            if out:
                                return
                        else:
                            ctx.acc.extend(out)
                elif kind == "LG":
                    o = args[0]
                    if ctx.phase == 1:
                        if o not in ctx.old_stored:
                            return
                        ctx.emitted = ctx.emitted + ctx.old_stored.pop(o)
                    elif ctx.phase == 2:
                        if ctx.acc is None:
                            if o in ctx.old_stored:
                                return
                        else:
                            if o not in ctx.old_stored:
                                return
                            ctx.acc.extend(ctx.old_stored.pop(o))
                else:  # RG
                    e = args[0]
                    if ctx.phase == 0:
                        if ctx.active is None:
                            return
                        for k in range(len(ctx.active) + 1):
                            branch = ctx.copy()
                            branch.new_claims[e] = tuple(ctx.active[:k])
                            branch.active = list(ctx.active[k:])
                            yield from go(idx + 1, branch)
                        return
                    if ctx.phase == 1:
                        for w in self._claim_words:
                            branch = ctx.copy()
                            branch.new_claims[e] = w
                            branch.emitted = branch.emitted + w
                            yield from go(idx + 1, branch)
                        return
                idx += 1
            if ctx.phase != 2 or ctx.acc is not None or ctx.active is not None:
                return
            if ctx.old_stored or ctx.old_claims:
                return
            yield (ctx.emitted, BuilderState(
                cs=csr, kind="D", fy=fy2, block=None,
                stored=tuple(sorted(ctx.new_stored.items())),
                claims=tuple(sorted(ctx.new_claims.items()))))

        yield from go(0, self._base_ctx(state))

    def _run_block(self, state, csr, walk, ylo2, yhi2):
        par = self.params
        blk = state.block

        # The block's walk region must be a contiguous range of markers.
        marks = [(i, it) for i, it in enumerate(walk)
                 if it[0] in ("L", "R")]
        inset = []
        for i, it in marks:
            inside = (blk.ylo <= it[1] <= blk.yhi) if it[0] == "L" \
                else (ylo2 <= it[1] <= yhi2)
            inset.append((i, inside))
        in_idx = [i for i, inside in inset if inside]
        if not in_idx:
            return
        first, last = in_idx[0], in_idx[-1]
        if any(first <= i <= last and not inside for i, inside in inset):
            return

        def go(idx, ctx):
            while idx < len(walk):
                kind, *args = walk[idx]
                if idx == first:
                    ctx.phase = 1
                if kind == "L":
                    y = args[0]
                    if ctx.phase == 0 and ctx.active is not None:
                        if ctx.active:
                            return
                        ctx.active = None
                    if ctx.phase == 0 and y % 2 == 0:
                        if y not in ctx.old_claims:
                            return
                        ctx.active = list(ctx.old_claims.pop(y))
                    if ctx.phase == 1:
                        want = blk.tags[y - blk.ylo]
                        if ctx.cur_tag is None:
                            ctx.cur_tag = want
                        elif ctx.cur_tag != want:
                            return
                elif kind == "R":
                    y = args[0]
                    if (ctx.phase == 2 and ctx.acc is not None
                            and y == ctx.acc_key + 1):
                        word = tuple(ctx.acc)
                        if len(word) > par.register:
                            return
                        ctx.new_stored[ctx.acc_key] = word
                        ctx.acc_key, ctx.acc = None, None
                    if ctx.phase == 1:
                        if ctx.cur_tag is None:
                            for tg in ctx.pat.guessable_tags():
                                branch = ctx.copy()
                                branch.cur_tag = tg
                                branch.new_tags[y] = tg
                                if idx == last:
                                    branch.phase = 2
                                yield from go(idx + 1, branch)
                            return
                        ctx.new_tags[y] = ctx.cur_tag
                    if ctx.phase == 2 and y % 2 == 1 and ctx.acc is None:
                        ctx.acc_key, ctx.acc = y, []
                elif kind == "T":
                    out = args[0].out
                    if ctx.phase == 0:
                        if ctx.active is None:
                            return
                        if tuple(ctx.active[:len(out)]) != out:
                            return
                        del ctx.active[:len(out)]
                    elif ctx.phase == 1:
                        for pat2, tag2 in tag_consume(ctx.pat, ctx.cur_tag,
                                                      out):
                            for pat3, ptr2, emit in tag_emit(
                                    pat2, ctx.ptr, len(out), self.alphabet):
                                branch = ctx.copy()
                                branch.pat, branch.cur_tag = pat3, tag2
                                branch.ptr = ptr2
                                branch.emitted = branch.emitted + emit
                                if idx == last:
                                    branch.phase = 2
                                yield from go(idx + 1, branch)
                        return
                    else:
                        if ctx.acc is None:
                            if out:
                                return
                        else:
                            ctx.acc.extend(out)
                elif kind == "LG":
                    o = args[0]
                    if ctx.phase == 1:
                        if not blk.ylo <= o < blk.yhi:
                            return
                        ctx.cur_tag = blk.tags[o + 1 - blk.ylo]
                    elif ctx.phase == 2:
                        if ctx.acc is None:
                            if o in ctx.old_stored:
                                return
                        else:
                            if o not in ctx.old_stored:
                                return
                            ctx.acc.extend(ctx.old_stored.pop(o))
                    else:
                        if o in ctx.old_stored:
                            return
                else:  # RG
                    e = args[0]
                    if ctx.phase == 0:
                        if ctx.active is None:
                            return
                        for k in range(len(ctx.active) + 1):
                            branch = ctx.copy()
                            branch.new_claims[e] = tuple(ctx.active[:k])
                            branch.active = list(ctx.active[k:])
                            yield from go(idx + 1, branch)
                        return
                    if ctx.phase == 1:
                        branch = ctx.copy()
                        branch.cur_tag = None  # guessed at the next marker
                        yield from go(idx + 1, branch)
                        return
                if idx == last:
                    ctx.phase = 2
                idx += 1
            if ctx.phase != 2 or ctx.acc is not None or ctx.active is not None:
                return
            if ctx.old_stored or ctx.old_claims:
                return
            tags2 = tuple(ctx.new_tags.get(y) for y in range(ylo2, yhi2 + 1))
            if any(tg is None for tg in tags2):
                return
            yield (ctx.emitted, BuilderState(
                cs=csr, kind="B", fy=-1,
                block=BlockState(ylo2, yhi2, tags2, ctx.pat, ctx.ptr),
                stored=tuple(sorted(ctx.new_stored.items())),
                claims=tuple(sorted(ctx.new_claims.items()))))

        ctx0 = self._base_ctx(state)
        ctx0.pat, ctx0.ptr = blk.pat, blk.ptr
        ctx0.new_tags = {}
        yield from go(0, ctx0)

    # -- piece boundary events at the new cut -----------------------------

    def _with_events(self, out, state):
        seen = {(out, state)}
        frontier = [(out, state)]
        yield (out, state)
        for _ in range(self.params.max_events):
            nxt = []
            for o, s in frontier:
                for o2, s2 in self._boundary_events(o, s):
                    if (o2, s2) not in seen:
                        seen.add((o2, s2))
                        nxt.append((o2, s2))
                        yield (o2, s2)
            frontier = nxt
            if not frontier:
                break

    def _boundary_events(self, out, state):
        if state.kind == "D":
            yield from self._open_block(out, state)
        else:
            yield from self._close_block(out, state)

    def _open_block(self, out, state):
        key = (state.cs, state.fy, state.stored, state.claims)
        if key not in self._open_cache:
            self._open_cache[key] = [
                (o, s) for o, s in self._open_block_raw(state)]
        for extra, st2 in self._open_cache[key]:
            yield (out + extra, st2)

    def _open_block_raw(self, state):
        """Close the diagonal at its frontier and open a block there."""
        par = self.params
        y = state.fy
        h = len(state.cs)
        out = ()
        pats = [Pattern(p=p, a_len=a_len, c_len=c_len)
                for p in range(par.period + 1)
                for a_len in range((par.pattern_side if p else 0) + 1)
                for c_len in range(par.pattern_side + 1)]
        for yhi in range(y, h):
            for pat0 in pats:
                branches = [(pat0, dict(state.stored), (st,), ())
                            for st in pat0.start_tags()]
                for lev in range(y, yhi):
                    nxt = []
                    if lev % 2 == 1:  # left gap with known content
                        for pt, stq, tgs, w0 in branches:
                            if lev not in stq:
                                continue
                            word = stq[lev]
                            st2 = dict(stq)
                            st2.pop(lev)
                            for pt2, tag2 in tag_consume(pt, tgs[-1], word):
                                nxt.append((pt2, st2, tgs + (tag2,),
                                            w0 + word))
                    else:  # right gap: content scanned later
                        for pt, stq, tgs, w0 in branches:
                            for tg in pt.guessable_tags():
                                nxt.append((pt, stq, tgs + (tg,), w0))
                    branches = nxt
                    if not branches:
                        break
                for pt, stq, tgs, w0 in branches:
                    # The pointer starts where the anchor's tag does: both
                    # name offset zero of the block output.
                    for pt2, ptr2, emit in tag_emit(pt, tgs[0], len(w0),
                                                    self.alphabet):
                        blk = BlockState(y, yhi, tgs, pt2, ptr2)
                        yield (out + emit, BuilderState(
                            cs=state.cs, kind="B", fy=-1, block=blk,
                            stored=tuple(sorted(stq.items())),
                            claims=state.claims))

    def _close_block(self, out, state):
        """Close the block at its top level: emit the pattern remainder and
        convert pending right-side content into literal claims."""
        par = self.params
        blk = state.block
        if blk.tags[-1] != END:
            return
        claims = dict(state.claims)
        gap_levels = [e for e in range(blk.ylo, blk.yhi) if e % 2 == 0]
        if any(e in claims for e in gap_levels):
            return
        branches = [(blk.pat, {}, 0)]
        for e in gap_levels:
            start = blk.tags[e - blk.ylo]
            goal = blk.tags[e + 1 - blk.ylo]
            nxt = []
            for pt, cl, r in branches:
                for k in range(par.claim + 1):
                    for pt2, tag2, word in tag_emit(pt, start, k,
                                                    self.alphabet):
                        if tag2 != goal:
                            continue
                        cl2 = dict(cl)
                        cl2[e] = word
                        nxt.append((pt2, cl2, r + k))
            branches = nxt
            if not branches:
                return
        for pt, cl, r in branches:
            for pt2, ptr2, emit in tag_emit(pt, blk.ptr, r, self.alphabet):
                if ptr2 != END:
                    continue
                merged = dict(claims)
                merged.update(cl)
                yield (out + emit, BuilderState(
                    cs=state.cs, kind="D", fy=blk.yhi, block=None,
                    stored=state.stored,
                    claims=tuple(sorted(merged.items()))))


# ---------------------------------------------------------------------------
# Top-level construction


def construct_oneway(
    t: TwoWayTransducer, b: int, mode: str = "general",
    state_budget: int = 20000,
) -> TwoWayTransducer:
    """Explicit one-way transducer simulating all decomposable runs.

    The result is contained in `t` (every accepted input is mapped to the
    output of the guessed run), and its domain contains every input some
    successful run of which admits a b-decomposition.  Raises
    ResourceBudgetError when exploration exceeds the state budget.
    """
    if b < 1:
        raise ValueError("bound must be >= 1")
    h = t.height_bound
    if mode == "sweeping":
        params = BuildParams(pattern_side=2 * b, period=2 * b,
                             register=2 * h * b, claim=b,
                             state_budget=state_budget)
    else:
        params = BuildParams(pattern_side=b, period=b, register=b, claim=b,
                             state_budget=state_budget)
    finder = _SuccessorFinder(t, params)

    base_states = [BuilderState(cs=(q,), kind="D", fy=0, block=None,
                                stored=(), claims=())
                   for q in sorted(t.initial)]
    initial: list[BuilderState] = []
    for s in base_states:
        initial.append(s)
        initial.extend(s2 for _, s2 in finder._with_events((), s)
                       if s2 != s)

    index: dict[BuilderState, int] = {}
    order: list[BuilderState] = []
    edges: dict[tuple[int, str], list[tuple[Word, int]]] = {}

    def intern(s: BuilderState) -> int:
        if s not in index:
            if len(order) >= params.state_budget:
                raise ResourceBudgetError(
                    f"state budget {params.state_budget} exceeded")
            index[s] = len(order)
            order.append(s)
        return index[s]

    queue = deque()
    init_ids = []
    for s in initial:
        sid = intern(s)
        if sid not in init_ids:
            init_ids.append(sid)
            queue.append(sid)
    explored: set[int] = set()
    while queue:
        sid = queue.popleft()
        if sid in explored:
            continue
        explored.add(sid)
        state = order[sid]
        for sym in t.input_alphabet:
            succ = finder.successors(state, sym)
            if not succ:
                continue
            targets = []
            for out, nxt in succ:
                nid = intern(nxt)
                targets.append((out, nid))
                if nid not in explored:
                    queue.append(nid)
            edges[(sid, sym)] = targets

    finals = {i for i, s in enumerate(order)
              if len(s.cs) == 1 and s.cs[0] in t.final and s.kind == "D"
              and s.fy == 0 and not s.stored and not s.claims}

    rev: dict[int, set[int]] = {}
    for (sid, _), targets in edges.items():
        for _, nid in targets:
            rev.setdefault(nid, set()).add(sid)
    alive = set(finals)
    work = deque(finals)
    while work:
        nid = work.popleft()
        for sid in rev.get(nid, ()):
            if sid not in alive:
                alive.add(sid)
                work.append(sid)
    alive &= explored | set(finals)

    keep = sorted(alive)
    names = {sid: f"s{k}" for k, sid in enumerate(keep)}
    transitions = []
    for (sid, sym), targets in sorted(edges.items()):
        if sid not in alive:
            continue
        for out, nid in targets:
            if nid in alive:
                transitions.append((names[sid], sym, names[nid], "R", out))
    init_names = [names[sid] for sid in init_ids if sid in alive]
    final_names = [names[sid] for sid in keep if sid in finals]
    if not init_names:
        return make_transducer(
            states=["dead"], inner_alphabet=t.inner_alphabet(),
            output_alphabet=t.output_alphabet, transitions=[],
            initial=["dead"], final=[], kind="oneway")
    return make_transducer(
        states=[names[sid] for sid in keep],
        inner_alphabet=t.inner_alphabet(),
        output_alphabet=t.output_alphabet,
        transitions=transitions,
        initial=init_names,
        final=final_names,
        kind="oneway")
