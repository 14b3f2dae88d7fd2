"""Signed letters and freely reduced words over named alphabets.

A letter is a ``(name, sign)`` pair with sign +1 or -1.  A word is a tuple
of letters; every function here keeps words freely reduced.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Letter = tuple[str, int]
Word = tuple[Letter, ...]

EMPTY: Word = ()


def letter(name: str, sign: int = 1) -> Letter:
    if sign not in (1, -1):
        raise ValueError(f"letter sign must be +1 or -1, got {sign!r}")
    return (name, sign)


def inv_letter(x: Letter) -> Letter:
    return (x[0], -x[1])


def inv(w: Sequence[Letter]) -> Word:
    return tuple((name, -sign) for name, sign in reversed(w))


def reduce_letters(seq: Iterable[Letter]) -> list[Letter]:
    """Freely reduce a letter sequence (generic: works for mixed alphabets)."""
    out: list[Letter] = []
    for x in seq:
        if out and out[-1][0] == x[0] and out[-1][1] == -x[1]:
            out.pop()
        else:
            out.append(x)
    return out


def mul(*parts: Sequence[Letter]) -> Word:
    seq: list[Letter] = []
    for p in parts:
        seq.extend(p)
    return tuple(reduce_letters(seq))


def is_reduced(w: Sequence[Letter]) -> bool:
    return all(not (a[0] == b[0] and a[1] == -b[1]) for a, b in zip(w, w[1:]))


def power(w: Sequence[Letter], e: int) -> Word:
    if e < 0:
        return power(inv(w), -e)
    out: Word = EMPTY
    for _ in range(e):
        out = mul(out, w)
    return out


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split a reduced word as ``x * core * x^-1`` with ``core`` cyclically reduced.

    Returns ``(core, x)``.
    """
    i, j = 0, len(w)
    while j - i >= 2 and w[i][0] == w[j - 1][0] and w[i][1] == -w[j - 1][1]:
        i += 1
        j -= 1
    return w[i:j], w[:i]


def nth_root(w: Word, n: int) -> Word | None:
    """A reduced u with reduced(u**n) == w, or None if no such u exists."""
    if n < 1:
        raise ValueError("exponent must be >= 1")
    if n == 1:
        return w
    core, x = cyclic_reduce(w)
    if not core:
        # w = x * x^-1 can only be reduced when x is empty
        return EMPTY if not w else None
    if len(core) % n:
        return None
    v = core[: len(core) // n]
    if v * n != core:
        return None
    return mul(x, v, inv(x))


def fmt_letter(x: Letter) -> str:
    return x[0] if x[1] == 1 else x[0] + "^-1"


def parse_letter(tok: str) -> Letter:
    if tok.endswith("^-1"):
        return (tok[:-3], -1)
    if tok.endswith("^1"):
        return (tok[:-2], 1)
    return (tok, 1)


def fmt_word(w: Sequence[Letter]) -> str:
    return " ".join(fmt_letter(x) for x in w) if w else "1"


def parse_word(text: str) -> Word:
    text = text.strip()
    if not text or text == "1":
        return EMPTY
    w = tuple(parse_letter(tok) for tok in text.split())
    if not is_reduced(w):
        raise ValueError(f"word is not freely reduced: {text!r}")
    return w
