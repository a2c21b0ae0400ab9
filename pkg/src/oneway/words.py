"""Word combinatorics: periods, Fine-Wilf combination, almost periodicity.

Words are arbitrary sequences (strings or tuples of tokens); all results
are index-based, so both representations behave identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence


def minimal_period(w: Sequence) -> int:
    """Smallest p >= 1 with w[i] == w[i+p] for all valid i; 0 for the empty word.

    Uses the KMP failure function; `has_period` is the independent
    definition-scan used to cross-check it in tests.
    """
    n = len(w)
    if n == 0:
        return 0
    fail = [0] * (n + 1)
    k = 0
    for i in range(1, n):
        while k > 0 and w[i] != w[k]:
            k = fail[k]
        if w[i] == w[k]:
            k += 1
        fail[i + 1] = k
    return n - fail[n]


def has_period(w: Sequence, p: int) -> bool:
    """True iff p >= 1 is a period of w (vacuously true when p >= len(w))."""
    if p < 1:
        raise ValueError("period must be >= 1")
    return all(w[i] == w[i + p] for i in range(len(w) - p))


@dataclass(frozen=True)
class FineWilfResult:
    combined: Sequence
    period: int


def fine_wilf(
    w1: Sequence, w2: Sequence, overlap: int, p1: int, p2: int
) -> Optional[FineWilfResult]:
    """Combine p1-periodic w1 and p2-periodic w2 sharing an overlap.

    The last `overlap` symbols of w1 must equal the first `overlap` symbols
    of w2.  When the overlap is long enough (>= p1 + p2 - gcd(p1, p2)), the
    combined word w1 + w2[overlap:] has period gcd(p1, p2); returns None
    when the length hypothesis fails.
    """
    if not (0 <= overlap <= min(len(w1), len(w2))):
        raise ValueError("overlap exceeds word lengths")
    if not has_period(w1, p1):
        raise ValueError("first word does not have the claimed period")
    if not has_period(w2, p2):
        raise ValueError("second word does not have the claimed period")
    if tuple(w1[len(w1) - overlap:]) != tuple(w2[:overlap]):
        raise ValueError("words do not share the claimed overlap")
    g = math.gcd(p1, p2)
    if overlap < p1 + p2 - g:
        return None
    combined = w1 + w2[overlap:]
    assert has_period(w1, g) and has_period(w2, g) and has_period(combined, g)
    return FineWilfResult(combined, g)


def almost_periodic_decompose(
    w: Sequence, p: int
) -> Optional[tuple[Sequence, Sequence, Sequence]]:
    """Split w as w0 w1 w2 with |w0|, |w2| <= p and period(w1) <= p.

    Exhaustive over cut points; returns the witness with the shortest w0,
    then the shortest w2, or None.
    """
    if p < 0:
        raise ValueError("bound must be >= 0")
    n = len(w)
    for i in range(min(p, n) + 1):
        for k in range(min(p, n - i) + 1):
            mid = w[i:n - k]
            if len(mid) == 0 or minimal_period(mid) <= p:
                return (w[:i], mid, w[n - k:])
    return None


@dataclass(frozen=True)
class IteratedFactorWord:
    """Skeleton v0 v1^e1 v2^e2 ... vk^ek v(k+1): the middle words carry exponents.

    `words` holds v0 .. v(k+1); `slots[i-1]` names the variable (1 or 2)
    whose value becomes the exponent of v(i).  `instantiate` fills both
    variables, `instantiate_vector` gives every slot its own exponent.
    """

    words: tuple  # k+2 words v0 .. v(k+1)
    slots: tuple  # k entries, each 1 or 2

    def __post_init__(self):
        if len(self.words) != len(self.slots) + 2:
            raise ValueError("need exactly two more words than slots")
        if any(s not in (1, 2) for s in self.slots):
            raise ValueError("slots name variable 1 or 2")

    def instantiate(self, n1: int, n2: int):
        return self.instantiate_vector(
            [n1 if s == 1 else n2 for s in self.slots])

    def instantiate_vector(self, exponents: Sequence[int]):
        if len(exponents) != len(self.slots):
            raise ValueError("need one exponent per slot")
        if any(e < 0 for e in exponents):
            raise ValueError("exponents must be >= 0")
        word = self.words[0]
        for v, e in zip(self.words[1:-1], exponents):
            word = word + v * e
        return word + self.words[-1]


def check_periods_lemma(
    s: IteratedFactorWord, p: int, n_big: int, samples: Sequence[Sequence[int]]
) -> bool:
    """Test the iterated-factor periodicity law on sampled exponent vectors.

    Requires the uniform instance with every exponent n_big > p to have
    period p; the law predicts every sampled vector then yields a
    p-periodic word, so a False return flags an implementation bug.
    """
    if n_big <= p:
        raise ValueError("need n_big > p")
    base = s.instantiate_vector([n_big] * len(s.slots))
    if not has_period(base, p):
        raise ValueError("uniform instance does not have the claimed period")
    return all(
        has_period(s.instantiate_vector(vec), p) for vec in samples)
