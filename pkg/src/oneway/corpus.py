"""Generated example transducers: input doublers, the multi-factor
copying transduction, and the counter-checking family fn(n).
"""

from __future__ import annotations

import re
from typing import Sequence

from .transducer import TwoWayTransducer, make_transducer


def double_abc_star() -> TwoWayTransducer:
    """Sweeping doubler on (abc)*: maps u to u u."""
    trs = [("i", "^", "p0", "R", ())]
    cyc = ["a", "b", "c"]
    for k in range(3):
        trs.append((f"p{k}", cyc[k], f"p{(k + 1) % 3}", "R", (cyc[k],)))
        trs.append((f"q{k}", cyc[k], f"q{(k + 1) % 3}", "R", (cyc[k],)))
        trs.append(("back", cyc[k], "back", "L", ()))
    trs.append(("p0", "$", "back", "L", ()))
    trs.append(("back", "^", "q0", "R", ()))
    trs.append(("q0", "$", "f", "R", ()))
    return make_transducer(
        states=["i", "p0", "p1", "p2", "back", "q0", "q1", "q2", "f"],
        inner_alphabet=cyc, output_alphabet=cyc,
        transitions=trs, initial=["i"], final=["f"], kind="sweeping")


def double_ab_star() -> TwoWayTransducer:
    """Sweeping doubler on (a+b)*: not one-way definable."""
    trs = [("i", "^", "p", "R", ())]
    for sym in ("a", "b"):
        trs.append(("p", sym, "p", "R", (sym,)))
        trs.append(("q", sym, "q", "R", (sym,)))
        trs.append(("back", sym, "back", "L", ()))
    trs.append(("p", "$", "back", "L", ()))
    trs.append(("back", "^", "q", "R", ()))
    trs.append(("q", "$", "f", "R", ()))
    return make_transducer(
        states=["i", "p", "back", "q", "f"],
        inner_alphabet=["a", "b"], output_alphabet=["a", "b"],
        transitions=trs, initial=["i"], final=["f"], kind="sweeping")


def double_finite(words: Sequence[Sequence[str]]) -> TwoWayTransducer:
    """One-way doubler of a finite language: stores the input in the state."""
    words = [tuple(w) for w in words]
    alphabet = sorted({sym for w in words for sym in w})
    prefixes = {()}
    for w in words:
        for i in range(len(w) + 1):
            prefixes.add(w[:i])
    name = {p: "e" if not p else "_".join(p) for p in sorted(prefixes)}
    trs = [("i", "^", name[()], "R", ())]
    for p in sorted(prefixes):
        for sym in alphabet:
            if p + (sym,) in prefixes:
                trs.append((name[p], sym, name[p + (sym,)], "R", (sym,)))
        if p in words:
            trs.append((name[p], "$", "f", "R", p))
    return make_transducer(
        states=["i"] + [name[p] for p in sorted(prefixes)] + ["f"],
        inner_alphabet=alphabet, output_alphabet=alphabet,
        transitions=trs, initial=["i"], final=["f"], kind="oneway")


def oneway_double_abc_star() -> TwoWayTransducer:
    """Hand-written one-way doubler on (abc)*: emits ab, ca, bc per letter."""
    trs = [
        ("i", "^", "o0", "R", ()),
        ("o0", "a", "o1", "R", ("a", "b")),
        ("o1", "b", "o2", "R", ("c", "a")),
        ("o2", "c", "o0", "R", ("b", "c")),
        ("o0", "$", "f", "R", ()),
    ]
    return make_transducer(
        states=["i", "o0", "o1", "o2", "f"],
        inner_alphabet=["a", "b", "c"], output_alphabet=["a", "b", "c"],
        transitions=trs, initial=["i"], final=["f"], kind="oneway")


def running_example() -> TwoWayTransducer:
    """Copies each #-separated factor twice iff it lies in (abc)* and the
    next factor has even length; two-way with mid-word reversals.

    Phases: A0/A1/A2 scan a factor emitting it and tracking the abc
    pattern; N likewise once the pattern broke; Pe/Po scan the next factor
    for parity; RB1/RB2 return to the factor start for a second pass; RN
    returns to the separator when no copy is due; C re-emits the factor.
    """
    letters = ["a", "b", "c"]
    cyc = {"a": (0, 1), "b": (1, 2), "c": (2, 0)}
    trs = [("i", "^", "A0", "R", ())]
    for sym in letters:
        k, nxt = cyc[sym]
        for j in range(3):
            tgt = f"A{nxt}" if j == k else "N"
            trs.append((f"A{j}", sym, tgt, "R", (sym,)))
        trs.append(("N", sym, "N", "R", (sym,)))
        trs.append(("Pe", sym, "Po", "R", ()))
        trs.append(("Po", sym, "Pe", "R", ()))
        trs.append(("RB1", sym, "RB1", "L", ()))
        trs.append(("RB2", sym, "RB2", "L", ()))
        trs.append(("RN", sym, "RN", "L", ()))
        trs.append(("C", sym, "C", "R", (sym,)))
    # Factor ends at '#': conforming factors check the next factor's parity.
    trs.append(("A0", "#", "Pe", "R", ()))
    for src in ("A1", "A2", "N"):
        trs.append((src, "#", "A0", "R", ("#",)))
    # Parity scan ends at the following '#' or at '$'.
    trs.append(("Pe", "#", "RB1", "L", ()))   # even: go back and copy
    trs.append(("Po", "#", "RN", "L", ()))    # odd: go back, no copy
    trs.append(("Pe", "$", "RB1", "L", ()))
    trs.append(("Po", "$", "RN", "L", ()))
    trs.append(("RB1", "#", "RB2", "L", ()))
    for stop in ("#", "^"):
        trs.append(("RB2", stop, "C", "R", ()))
        trs.append(("RN", stop, "D", "R", ()))  # skip factor already emitted
    for sym in letters:
        trs.append(("D", sym, "D", "R", ()))
    trs.append(("D", "#", "A0", "R", ("#",)))
    trs.append(("C", "#", "A0", "R", ("#",)))
    # Factor ends at '$'.
    trs.append(("A0", "$", "RB2", "L", ()))   # empty next factor: copy
    for src in ("A1", "A2", "N"):
        trs.append((src, "$", "f", "R", ()))
    trs.append(("C", "$", "f", "R", ()))
    trs.append(("D", "$", "f", "R", ()))
    trs.append(("i", "$", "f", "R", ()))  # unreachable guard; ^ comes first
    return make_transducer(
        states=["i", "A0", "A1", "A2", "N", "Pe", "Po",
                "RB1", "RB2", "RN", "C", "D", "f"],
        inner_alphabet=letters + ["#"], output_alphabet=letters + ["#"],
        transitions=trs, initial=["i"], final=["f"], kind="twoway")


def running_semantics(tokens: Sequence[str]) -> tuple[str, ...] | None:
    """Reference semantics of the running example, or None if undefined."""
    factors: list[list[str]] = [[]]
    for tok in tokens:
        if tok == "#":
            factors.append([])
        else:
            factors[-1].append(tok)
    out: list[str] = []
    for i, fac in enumerate(factors):
        nxt_len = len(factors[i + 1]) if i + 1 < len(factors) else 0
        word = tuple(fac)
        in_abc = "".join(word) == "abc" * (len(word) // 3) and len(word) % 3 == 0
        if in_abc and nxt_len % 2 == 0:
            out.extend(word)
            out.extend(word)
        else:
            out.extend(word)
        if i + 1 < len(factors):
            out.append("#")
    return tuple(out)


def fn_family(n: int) -> TwoWayTransducer:
    """Deterministic sweeping transducer for the doubling family f_n.

    Inputs a_0 w_0 .. a_{2^n-1} w_{2^n-1} with letters in {a, b} and w_i
    the n-bit encoding of i (tokens 0/1, most significant first); n check
    passes validate the encodings bit by bit, two copy passes emit the
    input twice.
    """
    if not 1 <= n <= 6:
        raise ValueError("fn(n) supported for 1 <= n <= 6")
    states: list[str] = ["i"]
    trs: list[tuple] = []
    letters = ("a", "b")
    bits = ("0", "1")

    def add(src, sym, dst, d, out=()):
        trs.append((src, sym, dst, d, out))

    add("i", "^", "c0_start", "R")
    for j in range(n):  # pass j checks the bit of weight 2^j
        pos_of_bit = n - j  # 1-based offset of that bit inside each block
        start = f"c{j}_start"
        states.append(start)
        # States track (offset within block, expected bit, carry-so-far);
        # expected is the bit value this block must show at pos_of_bit,
        # carry the AND of the bits below it (drives the next toggle).
        for off in range(n + 1):
            for exp in bits:
                for carry in (0, 1):
                    states.append(f"c{j}_{off}_{exp}_{carry}")
        for exp in bits:
            for carry in (0, 1):
                src0 = f"c{j}_{n}_{exp}_{carry}"
                nxt_exp = bits[int(exp) ^ carry]
                for a in letters:
                    add(src0, a, f"c{j}_0_{nxt_exp}_1", "R")
        for a in letters:
            add(start, a, f"c{j}_0_0_1", "R")
        for off in range(n):
            for exp in bits:
                for carry in (0, 1):
                    src = f"c{j}_{off}_{exp}_{carry}"
                    for bit in bits:
                        if off + 1 == pos_of_bit and bit != exp:
                            continue  # wrong bit at the checked position
                        new_carry = (carry and bit == "1") \
                            if off + 1 > pos_of_bit else carry
                        add(src, bit, f"c{j}_{off + 1}_{exp}_{int(new_carry)}",
                            "R")
        ret = f"r{j}"
        states.append(ret)
        # Accept the pass only if the last block showed bit 1 (all-ones end).
        add(f"c{j}_{n}_1_1", "$", ret, "L")
        add(f"c{j}_{n}_1_0", "$", ret, "L")
        for sym in letters + bits:
            add(ret, sym, ret, "L")
        nxt = f"c{j + 1}_start" if j + 1 < n else "copy1"
        add(ret, "^", nxt, "R")
    states += ["copy1", "rc", "copy2", "f"]
    for sym in letters + bits:
        add("copy1", sym, "copy1", "R", (sym,))
        add("rc", sym, "rc", "L")
        add("copy2", sym, "copy2", "R", (sym,))
    add("copy1", "$", "rc", "L")
    add("rc", "^", "copy2", "R")
    add("copy2", "$", "f", "R")
    return make_transducer(
        states=states, inner_alphabet=list(letters + bits),
        output_alphabet=list(letters + bits),
        transitions=trs, initial=["i"], final=["f"], kind="sweeping")


def fn_domain_word(n: int, choices: Sequence[str]) -> tuple[str, ...]:
    """The fn(n) input with the given letter choices a_0 .. a_{2^n - 1}."""
    if len(choices) != 2 ** n:
        raise ValueError("need one letter per block")
    out: list[str] = []
    for i, ch in enumerate(choices):
        out.append(ch)
        out.extend(format(i, f"0{n}b"))
    return tuple(out)


_DOUBLE_RE = re.compile(r"^double\((.*)\)$")
_FN_RE = re.compile(r"^fn\((\d+)\)$")


def gen_corpus(spec: str) -> TwoWayTransducer:
    """Build a corpus transducer from its textual name."""
    spec = spec.strip()
    m = _DOUBLE_RE.match(spec)
    if m:
        inner = m.group(1).strip()
        if inner == "(abc)*":
            return double_abc_star()
        if inner in ("(a+b)*", "(a|b)*"):
            return double_ab_star()
        if inner.startswith("{") and inner.endswith("}"):
            words = [tuple(w.split()) if " " in w else tuple(w)
                     for w in inner[1:-1].split(",") if w.strip()]
            return double_finite([w for w in words])
        raise ValueError(f"unsupported double() shape: {inner!r}")
    m = _FN_RE.match(spec)
    if m:
        return fn_family(int(m.group(1)))
    if spec == "running":
        return running_example()
    if spec == "double_oneway((abc)*)":
        return oneway_double_abc_star()
    raise ValueError(f"unsupported corpus spec: {spec!r}")
