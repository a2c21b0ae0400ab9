"""Two-way transducer model plus the line-oriented text format.

Input words carry the reserved endmarkers `^` (left) and `$` (right);
user alphabets may not contain them.  A transducer is a tuple of states,
alphabets, output-annotated transitions with directions, and initial and
final state sets, with a declared kind (twoway, sweeping or oneway).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

LEFT_MARK = "^"
RIGHT_MARK = "$"

KINDS = ("twoway", "sweeping", "oneway")


class ParseError(ValueError):
    """Malformed transducer text; carries the 1-based line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


class ValidationError(ValueError):
    """Structurally well-formed text violating a model invariant."""


@dataclass(frozen=True, order=True)
class Transition:
    src: str
    read: str
    dst: str
    direction: str  # 'R' or 'L'
    out: tuple[str, ...]

    def render(self) -> str:
        out = " ".join(self.out) if self.out else "-"
        return f"{self.src} {self.read} -> {self.dst} {self.direction} | {out}"


@dataclass(frozen=True)
class TwoWayTransducer:
    states: tuple[str, ...]
    input_alphabet: tuple[str, ...]   # includes the endmarkers
    output_alphabet: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial: tuple[str, ...]
    final: tuple[str, ...]
    kind: str = "twoway"

    def __post_init__(self):
        _validate(self)

    @property
    def cmax(self) -> int:
        """Longest output of a single transition (0 for the empty machine)."""
        return max((len(t.out) for t in self.transitions), default=0)

    @property
    def height_bound(self) -> int:
        """Crossing-sequence bound 2|Q|-1 for normalized runs."""
        return 2 * len(self.states) - 1

    def inner_alphabet(self) -> tuple[str, ...]:
        return tuple(a for a in self.input_alphabet
                     if a not in (LEFT_MARK, RIGHT_MARK))

    def transitions_from(self, state: str, symbol: str) -> list[Transition]:
        try:
            index = object.__getattribute__(self, "_from_index")
        except AttributeError:
            index = {}
            for t in sorted(self.transitions):
                index.setdefault((t.src, t.read), []).append(t)
            object.__setattr__(self, "_from_index", index)
        return index.get((state, symbol), [])

    def render(self) -> str:
        lines = [
            "states: " + " ".join(self.states),
            "input: " + " ".join(self.inner_alphabet()),
            "output: " + " ".join(self.output_alphabet),
            "init: " + " ".join(self.initial),
            "final: " + " ".join(self.final),
            "kind: " + self.kind,
        ]
        lines.extend(t.render() for t in self.transitions)
        return "\n".join(lines) + "\n"


def _validate(t: TwoWayTransducer) -> None:
    states = set(t.states)
    if len(states) != len(t.states):
        raise ValidationError("duplicate state names")
    for mark in (LEFT_MARK, RIGHT_MARK):
        if mark not in t.input_alphabet:
            raise ValidationError(f"input alphabet must include {mark!r}")
        if mark in t.output_alphabet:
            raise ValidationError(f"endmarker {mark!r} in output alphabet")
    if t.kind not in KINDS:
        raise ValidationError(f"unknown kind {t.kind!r}")
    for q in t.initial:
        if q not in states:
            raise ValidationError(f"unknown initial state {q!r}")
    for q in t.final:
        if q not in states:
            raise ValidationError(f"unknown final state {q!r}")
    in_alpha = set(t.input_alphabet)
    out_alpha = set(t.output_alphabet)
    for tr in t.transitions:
        if tr.src not in states or tr.dst not in states:
            raise ValidationError(f"transition uses unknown state: {tr.render()}")
        if tr.read not in in_alpha:
            raise ValidationError(f"transition reads unknown symbol: {tr.render()}")
        if tr.direction not in ("R", "L"):
            raise ValidationError(f"bad direction in: {tr.render()}")
        if tr.read == LEFT_MARK and tr.direction == "L":
            raise ValidationError("left move on left endmarker")
        for sym in tr.out:
            if sym in (LEFT_MARK, RIGHT_MARK):
                raise ValidationError("endmarker in transition output")
            if sym not in out_alpha:
                raise ValidationError(
                    f"transition emits unknown symbol {sym!r}")
    if t.kind == "oneway":
        for tr in t.transitions:
            if tr.direction != "R":
                raise ValidationError("oneway transducer with a left move")
    if t.kind == "sweeping":
        _validate_sweeping(t)


def _validate_sweeping(t: TwoWayTransducer) -> None:
    """Reversals only at the borders: states split into right- and left-movers.

    Constraint propagation from the initial states; a state reached both
    while moving right and while moving left on inner symbols would allow a
    mid-word reversal, which sweeping transducers exclude.
    """
    direction: dict[str, str] = {q: "R" for q in t.initial}
    pending = list(t.initial)
    inner = set(t.inner_alphabet())

    def assign(state: str, d: str, tr: Transition) -> None:
        if direction.get(state, d) != d:
            raise ValidationError(
                f"sweeping transducer reverses mid-word at: {tr.render()}")
        if state not in direction:
            direction[state] = d
            pending.append(state)

    while pending:
        q = pending.pop()
        d = direction[q]
        for tr in t.transitions:
            if tr.src != q:
                continue
            if tr.read in inner:
                if tr.direction != d:
                    raise ValidationError(
                        f"sweeping transducer reverses mid-word at: {tr.render()}")
                assign(tr.dst, d, tr)
            elif tr.read == RIGHT_MARK:
                # Reading $ while moving left never fires; skip silently.
                if d == "R":
                    assign(tr.dst, "L" if tr.direction == "L" else "R", tr)
            elif tr.read == LEFT_MARK:
                assign(tr.dst, "R", tr)


def parse_transducer(text: str) -> TwoWayTransducer:
    """Parse the line-oriented format; `#` starts a comment."""
    header: dict[str, list[str]] = {}
    transitions: list[Transition] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key = line.split(":", 1)[0].strip()
        if ":" in line and key in ("states", "input", "output", "init",
                                   "final", "kind"):
            if key in header:
                raise ParseError(f"duplicate {key!r} line", lineno)
            header[key] = line.split(":", 1)[1].split()
            continue
        transitions.append(_parse_transition(line, lineno))
    for key in ("states", "init", "final", "kind"):
        if key not in header:
            raise ParseError(f"missing {key!r} line")
    kind_words = header["kind"]
    if len(kind_words) != 1:
        raise ParseError("kind line needs exactly one value")
    try:
        return TwoWayTransducer(
            states=tuple(header["states"]),
            input_alphabet=tuple(header.get("input", []))
            + (LEFT_MARK, RIGHT_MARK),
            output_alphabet=tuple(header.get("output", [])),
            transitions=tuple(transitions),
            initial=tuple(header["init"]),
            final=tuple(header["final"]),
            kind=kind_words[0],
        )
    except ValidationError:
        raise


def _parse_transition(line: str, lineno: int) -> Transition:
    if "|" in line:
        head, out_part = line.split("|", 1)
        out_tokens = out_part.split()
        if out_tokens == ["-"]:
            out_tokens = []
    else:
        raise ParseError("transition line needs '| output' part", lineno)
    tokens = head.split()
    if len(tokens) != 5 or tokens[2] != "->":
        raise ParseError(
            "expected 'src read -> dst DIR | out'", lineno)
    src, read, _, dst, direction = tokens
    if direction not in ("R", "L"):
        raise ParseError(f"direction must be R or L, got {direction!r}", lineno)
    return Transition(src, read, dst, direction, tuple(out_tokens))


def print_transducer(t: TwoWayTransducer) -> str:
    return t.render()


def make_transducer(
    states: Iterable[str],
    inner_alphabet: Iterable[str],
    output_alphabet: Iterable[str],
    transitions: Iterable[tuple],
    initial: Iterable[str],
    final: Iterable[str],
    kind: str = "twoway",
) -> TwoWayTransducer:
    """Build from (src, read, dst, direction, out-word) tuples; out-words
    may be strings of single-character tokens or token iterables."""
    trs = []
    for src, read, dst, direction, out in transitions:
        trs.append(Transition(src, read, dst, direction, tuple(out)))
    return TwoWayTransducer(
        states=tuple(states),
        input_alphabet=tuple(inner_alphabet) + (LEFT_MARK, RIGHT_MARK),
        output_alphabet=tuple(output_alphabet),
        transitions=tuple(trs),
        initial=tuple(initial),
        final=tuple(final),
        kind=kind,
    )
