"""Run simulation via crossing sequences.

A run is drawn on the grid of cut positions 0..omega and levels; level
parity encodes travel direction (even = arrived moving right, odd = arrived
moving left).  At an even-level location (x, y) the head reads the symbol
a_{x+1}, at an odd-level one it reads a_x, where the input word is
a_1 .. a_omega with a_1 = ^ and a_omega = $.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence

from .transducer import (LEFT_MARK, RIGHT_MARK, Transition, TwoWayTransducer)

Word = tuple[str, ...]


class Location(NamedTuple):
    pos: int
    level: int


def full_word(inner: Sequence[str]) -> Word:
    """Wrap a user word (no endmarkers) as ^ u $."""
    for sym in inner:
        if sym in (LEFT_MARK, RIGHT_MARK):
            raise ValueError(f"endmarker {sym!r} inside input word")
    return (LEFT_MARK,) + tuple(inner) + (RIGHT_MARK,)


def read_index(loc: Location) -> int:
    """1-based index of the symbol read from this location."""
    return loc.pos + 1 if loc.level % 2 == 0 else loc.pos


def step(loc: Location, direction: str, visits: dict[int, int]) -> Location:
    """Target location of a transition, given per-position visit counts."""
    if loc.level % 2 == 0:
        new_pos = loc.pos + 1 if direction == "R" else loc.pos
    else:
        new_pos = loc.pos if direction == "R" else loc.pos - 1
    return Location(new_pos, visits.get(new_pos, 0))


class Run:
    """A successful (or partial) run: locations, states and transitions.

    Immutable by convention; `locs[i]` carries `states[i]`, and `trans[i]`
    connects `locs[i]` to `locs[i+1]`.
    """

    def __init__(self, word: Word, states: Sequence[str],
                 locs: Sequence[Location], trans: Sequence[Transition],
                 accepts: bool):
        self.word = tuple(word)
        self.states = tuple(states)
        self.locs = tuple(locs)
        self.trans = tuple(trans)
        self.accepts = accepts
        if len(self.locs) != len(self.trans) + 1:
            raise ValueError("need one more location than transitions")
        if len(self.states) != len(self.locs):
            raise ValueError("need one state per location")
        self._index = {loc: i for i, loc in enumerate(self.locs)}
        if len(self._index) != len(self.locs):
            raise ValueError("run revisits a location")

    @property
    def omega(self) -> int:
        return len(self.word)

    def __len__(self) -> int:
        return len(self.trans)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Run)
                and self.word == other.word and self.locs == other.locs
                and self.states == other.states and self.trans == other.trans
                and self.accepts == other.accepts)

    def __hash__(self) -> int:
        return hash((self.word, self.locs, self.states, self.trans))

    def __repr__(self) -> str:
        return f"Run({' '.join(self.word)!r}, {len(self.trans)} steps)"

    def index(self, loc: Location) -> int:
        """Run-order index of a location (the order along the run)."""
        return self._index[loc]

    def has_location(self, loc: Location) -> bool:
        return loc in self._index

    def state_at(self, loc: Location) -> str:
        return self.states[self.index(loc)]

    def before(self, l1: Location, l2: Location) -> bool:
        """Run order: l1 occurs no later than l2."""
        return self.index(l1) <= self.index(l2)

    def output(self) -> Word:
        out: list[str] = []
        for t in self.trans:
            out.extend(t.out)
        return tuple(out)

    def crossing_sequence(self, x: int) -> tuple[str, ...]:
        if not 0 <= x <= self.omega:
            raise ValueError(f"position {x} out of range")
        levels: list[tuple[int, str]] = []
        for loc, q in zip(self.locs, self.states):
            if loc.pos == x:
                levels.append((loc.level, q))
        levels.sort()
        return tuple(q for _, q in levels)

    def height(self, x: int) -> int:
        return sum(1 for loc in self.locs if loc.pos == x)

    def locations_at(self, x: int) -> list[Location]:
        found = [loc for loc in self.locs if loc.pos == x]
        found.sort(key=lambda l: l.level)
        return found

    def render(self) -> str:
        parts = []
        for i, t in enumerate(self.trans):
            loc = self.locs[i]
            out = " ".join(t.out) if t.out else "-"
            parts.append(f"({loc.pos},{loc.level}) {t.src}"
                         f" --{t.read},{t.direction}|{out}-->")
        last = self.locs[-1]
        parts.append(f"({last.pos},{last.level}) {self.states[-1]}")
        return "\n".join(parts)


@dataclass(frozen=True)
class Fragment:
    """Contiguous factor of a run, in the run's own coordinates."""

    run: Run
    start: int  # index into run.locs
    stop: int   # inclusive index into run.locs

    def __post_init__(self):
        if not 0 <= self.start <= self.stop < len(self.run.locs):
            raise ValueError("fragment indices out of range")

    @property
    def locs(self) -> tuple[Location, ...]:
        return self.run.locs[self.start:self.stop + 1]

    @property
    def states(self) -> tuple[str, ...]:
        return self.run.states[self.start:self.stop + 1]

    @property
    def trans(self) -> tuple[Transition, ...]:
        return self.run.trans[self.start:self.stop]

    @property
    def first(self) -> Location:
        return self.run.locs[self.start]

    @property
    def last(self) -> Location:
        return self.run.locs[self.stop]

    def output(self) -> Word:
        out: list[str] = []
        for t in self.trans:
            out.extend(t.out)
        return tuple(out)

    def __len__(self) -> int:
        return self.stop - self.start


def factor(run: Run, l1: Location, l2: Location) -> Fragment:
    """The factor of the run between two of its locations (run order)."""
    i, j = run.index(l1), run.index(l2)
    if i > j:
        raise ValueError("locations out of run order")
    return Fragment(run, i, j)


def output_of(run: Run) -> Word:
    return run.output()


def crossing_sequence(run: Run, x: int) -> tuple[str, ...]:
    return run.crossing_sequence(x)


@dataclass(frozen=True)
class LocationSetOutput:
    locations: frozenset[Location]
    induced_output: Word


def subsequence_output(run: Run, zone: Iterable[Location]) -> LocationSetOutput:
    """Concatenated outputs of transitions with both endpoints in the set."""
    zset = frozenset(zone)
    out: list[str] = []
    for i, t in enumerate(run.trans):
        if run.locs[i] in zset and run.locs[i + 1] in zset:
            out.extend(t.out)
    return LocationSetOutput(zset, tuple(out))


def zone_output(run: Run, lo: int, hi: int,
                pos_lo: int, pos_hi: int) -> Word:
    """Output of the subsequence induced by run-order indices [lo, hi]
    intersected with positions [pos_lo, pos_hi]."""
    out: list[str] = []
    for i in range(lo, hi):
        a, b = run.locs[i], run.locs[i + 1]
        if (pos_lo <= a.pos <= pos_hi) and (pos_lo <= b.pos <= pos_hi):
            out.extend(run.trans[i].out)
    return tuple(out)


class EnumerationResult:
    """Runs found by `enumerate_runs`, plus a cap-pruning diagnostic."""

    def __init__(self, runs: list[Run], cap_hits: int):
        self.runs = runs
        self.cap_hits = cap_hits

    def __iter__(self) -> Iterator[Run]:
        return iter(self.runs)

    def __len__(self) -> int:
        return len(self.runs)


def enumerate_runs(
    t: TwoWayTransducer, inner: Sequence[str],
    height_cap: Optional[int] = None,
) -> EnumerationResult:
    """All successful normalized runs of t on ^ inner $, deterministically.

    Normalization is enforced during the search: a branch dies as soon as a
    position would see the same state twice at the same level parity.  The
    cap additionally bounds crossing-sequence heights; pruning at the cap is
    reported but cannot exclude normalized successful runs when the cap is
    the default 2|Q|-1.
    """
    if height_cap is None:
        height_cap = t.height_bound
    if height_cap < 1:
        raise ValueError("height cap must be >= 1")
    word = full_word(inner)
    omega = len(word)
    runs: list[Run] = []
    cap_hits = 0

    # Search state (mutated along the DFS path and restored on backtrack).
    visits: dict[int, int] = {}
    seen: set[tuple[int, str, int]] = set()  # (pos, state, parity)
    locs: list[Location] = []
    states: list[str] = []
    trans: list[Transition] = []

    def symbol_at(loc: Location) -> Optional[str]:
        idx = read_index(loc)
        if 1 <= idx <= omega:
            return word[idx - 1]
        return None

    def enter(loc: Location, state: str) -> bool:
        nonlocal cap_hits
        if visits.get(loc.pos, 0) >= height_cap:
            cap_hits += 1
            return False
        key = (loc.pos, state, loc.level % 2)
        if key in seen:
            return False
        visits[loc.pos] = visits.get(loc.pos, 0) + 1
        seen.add(key)
        locs.append(loc)
        states.append(state)
        return True

    def leave(loc: Location, state: str) -> None:
        visits[loc.pos] -= 1
        seen.remove((loc.pos, state, loc.level % 2))
        locs.pop()
        states.pop()

    def explore() -> None:
        loc = locs[-1]
        state = states[-1]
        if loc.pos == omega:
            if state in t.final:
                runs.append(Run(word, states, locs, trans, True))
            return
        sym = symbol_at(loc)
        if sym is None:
            return
        for tr in t.transitions_from(state, sym):
            nxt = step(loc, tr.direction, visits)
            if nxt.pos < 0:
                continue
            if enter(nxt, tr.dst):
                trans.append(tr)
                explore()
                trans.pop()
                leave(nxt, tr.dst)

    for q0 in sorted(t.initial):
        if enter(Location(0, 0), q0):
            explore()
            leave(Location(0, 0), q0)
    return EnumerationResult(runs, cap_hits)


def replay(t: TwoWayTransducer, word: Word, start_state: str,
           trans: Sequence[Transition]) -> Run:
    """Rebuild a run from a transition sequence, recomputing levels.

    Raises ValueError when the sequence is not applicable; acceptance is
    judged by the final location and state.
    """
    omega = len(word)
    visits = {0: 1}
    locs = [Location(0, 0)]
    states = [start_state]
    if start_state not in t.states:
        raise ValueError(f"unknown state {start_state!r}")
    for tr in trans:
        loc = locs[-1]
        idx = read_index(loc)
        if not 1 <= idx <= omega:
            raise ValueError("head fell off the word")
        if tr.src != states[-1] or tr.read != word[idx - 1]:
            raise ValueError(f"transition {tr.render()} not applicable")
        nxt = step(loc, tr.direction, visits)
        if nxt.pos < 0:
            raise ValueError("moved left of the left endmarker")
        visits[nxt.pos] = visits.get(nxt.pos, 0) + 1
        locs.append(nxt)
        states.append(tr.dst)
    accepts = (locs[-1].pos == omega and states[-1] in t.final
               and states[0] in t.initial)
    return Run(word, states, locs, trans, accepts)


def is_normalized(run: Run) -> bool:
    seen = set()
    for loc, q in zip(run.locs, run.states):
        key = (loc.pos, q, loc.level % 2)
        if key in seen:
            return False
        seen.add(key)
    return True


def normalize(t: TwoWayTransducer, run: Run) -> Run:
    """Delete factors between same-position same-parity state repeats.

    Output-preserving on successful runs of functional transducers, where
    such factors must produce empty output.
    """
    current = run
    while True:
        seen: dict[tuple[int, str, int], int] = {}
        cut = None
        for i, (loc, q) in enumerate(zip(current.locs, current.states)):
            key = (loc.pos, q, loc.level % 2)
            if key in seen:
                cut = (seen[key], i)
                break
            seen[key] = i
        if cut is None:
            return current
        i, j = cut
        new_trans = current.trans[:i] + current.trans[j:]
        current = replay(t, current.word, current.states[0], new_trans)


def intercepted_transition(run: Run, i: int, x1: int, x2: int) -> bool:
    """True when the i-th transition reads a symbol inside (x1, x2]."""
    idx = read_index(run.locs[i])
    return x1 + 1 <= idx <= x2


def intercepted_factors(run: Run, x1: int, x2: int) -> list[tuple[str, Fragment]]:
    """Maximal factors confined to [x1, x2], classified LL/LR/RL/RR.

    A transition belongs to the interval when it reads one of the symbols
    a_{x1+1} .. a_{x2}; factors are maximal chains of such transitions, and
    the class comes from the endpoint positions.
    """
    if not 0 <= x1 < x2 <= run.omega:
        raise ValueError("bad interval")
    result = []
    i = 0
    n = len(run.trans)
    while i < n:
        if not intercepted_transition(run, i, x1, x2):
            i += 1
            continue
        j = i
        while j < n and intercepted_transition(run, j, x1, x2):
            j += 1
        frag = Fragment(run, i, j)
        first, last = frag.first, frag.last
        kind = ("L" if first.pos == x1 else "R") + \
               ("L" if last.pos == x1 else "R")
        result.append((kind, frag))
        i = j
    return result


@dataclass(frozen=True)
class FunctionalityVerdict:
    functional_up_to: Optional[int]
    counterexample: Optional[tuple] = None  # (word, run1, run2, out1, out2)

    @property
    def ok(self) -> bool:
        return self.counterexample is None


def words_up_to(alphabet: Sequence[str], maxlen: int) -> Iterator[tuple[str, ...]]:
    alphabet = tuple(alphabet)
    queue: deque[tuple[str, ...]] = deque([()])
    while queue:
        w = queue.popleft()
        yield w
        if len(w) < maxlen:
            queue.extend(w + (a,) for a in alphabet)


def check_functional(t: TwoWayTransducer, maxlen: int) -> FunctionalityVerdict:
    """Brute-force functionality check over all inputs up to maxlen."""
    if maxlen < 0:
        raise ValueError("maxlen must be >= 0")
    for u in words_up_to(t.inner_alphabet(), maxlen):
        outs: dict[Word, Run] = {}
        for run in enumerate_runs(t, u).runs:
            w = run.output()
            if outs and w not in outs:
                other = next(iter(outs.values()))
                return FunctionalityVerdict(
                    None, (u, other, run, other.output(), w))
            outs[w] = run
    return FunctionalityVerdict(maxlen)


def output_set(t: TwoWayTransducer, inner: Sequence[str],
               height_cap: Optional[int] = None) -> frozenset[Word]:
    """Outputs of all successful normalized runs on ^ inner $.

    For one-way transducers this runs a forward subset construction over
    (position, state, emitted word), which collapses the run-level
    nondeterminism that plain enumeration would multiply out; two-way
    transducers fall back to run enumeration.
    """
    if t.kind != "oneway":
        return frozenset(r.output() for r in enumerate_runs(
            t, inner, height_cap).runs)
    word = full_word(inner)
    layer: dict[str, set[Word]] = {}
    for q in t.initial:
        layer.setdefault(q, set()).add(())
    for sym in word:
        nxt: dict[str, set[Word]] = {}
        for state, prefixes in layer.items():
            for tr in t.transitions_from(state, sym):
                bucket = nxt.setdefault(tr.dst, set())
                for pre in prefixes:
                    bucket.add(pre + tr.out)
        layer = nxt
        if not layer:
            return frozenset()
    out: set[Word] = set()
    for state, prefixes in layer.items():
        if state in t.final:
            out.update(prefixes)
    return frozenset(out)


def _oneway_match(t: TwoWayTransducer, inner: Sequence[str],
                  expected: Word) -> tuple[bool, Optional[Word]]:
    """(accepts, offending output) of a one-way transducer against one
    expected output word.

    Tracks, per state, the set of matched prefix lengths plus one sample
    word per divergent branch, so heavily nondeterministic machines stay
    polynomial as long as they agree with the expected output.
    """
    word = full_word(inner)
    n = len(expected)
    # layer: state -> {key: sample}, key = matched length or ('bad', ...)
    layer: dict[str, dict] = {}
    for q in t.initial:
        layer.setdefault(q, {})[0] = ()
    for sym in word:
        nxt: dict[str, dict] = {}
        for state, keys in layer.items():
            for tr in t.transitions_from(state, sym):
                bucket = nxt.setdefault(tr.dst, {})
                for key, sample in keys.items():
                    if isinstance(key, int):
                        k2 = key + len(tr.out)
                        if k2 <= n and expected[key:k2] == tr.out:
                            if k2 not in bucket:
                                bucket[k2] = sample + tr.out
                            continue
                        key = "bad"
                    if "bad" not in bucket:
                        bucket["bad"] = sample + tr.out
        layer = nxt
        if not layer:
            return False, None
    accepts = False
    offending: Optional[Word] = None
    for state, keys in layer.items():
        if state not in t.final:
            continue
        accepts = True
        for key, sample in keys.items():
            if key != n and offending is None:
                offending = sample
    return accepts, offending


@dataclass(frozen=True)
class EquivCounterexample:
    word: tuple[str, ...]
    outputs1: frozenset[Word]
    outputs2: frozenset[Word]

    def describe(self) -> str:
        def fmt(outs):
            return "{" + ", ".join(sorted(" ".join(o) for o in outs)) + "}"
        return (f"input {' '.join(self.word)!r}:"
                f" {fmt(self.outputs1)} vs {fmt(self.outputs2)}")


def equiv_bounded(
    t1: TwoWayTransducer, t2: TwoWayTransducer, maxlen: int,
) -> Optional[EquivCounterexample]:
    """First input (length-lexicographic) where the transducers disagree.

    Disagreement covers both output mismatch and one-sided domain
    membership; None means no difference up to maxlen.
    """
    alphabet = sorted(set(t1.inner_alphabet()) | set(t2.inner_alphabet()))
    for u in words_up_to(alphabet, maxlen):
        outs1 = output_set(t1, u)
        if t2.kind == "oneway" and len(outs1) <= 1:
            expected = next(iter(outs1)) if outs1 else ()
            accepts, offending = _oneway_match(t2, u, expected)
            if outs1:
                if not accepts:
                    return EquivCounterexample(u, outs1, frozenset())
                if offending is not None:
                    return EquivCounterexample(
                        u, outs1, outs1 | {offending})
            elif accepts:
                bad = offending if offending is not None else ()
                return EquivCounterexample(u, frozenset(), frozenset({bad}))
            continue
        outs2 = output_set(t2, u)
        if outs1 != outs2:
            return EquivCounterexample(u, outs1, outs2)
    return None
