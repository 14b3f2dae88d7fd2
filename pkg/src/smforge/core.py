"""Rewriting kernel: hardware, admissible words, rules, computations.

The machine model: state letters are grouped into ordered *parts*; between
consecutive parts sits a *sector* holding a freely reduced tape word.  A
rule rewrites every state letter in place, inserting at most one tape
letter on each side per part, and the result is freely reduced.  Cyclic
machines own one extra wrap-around sector between the last part and the
first.

Sector indexing: sector ``i`` lies between part ``i-1`` and part ``i``
(1-based, parts 0-based).  A cyclic machine with P parts also has the wrap
sector ``P``.  Sector 0 and sector P of a non-cyclic machine are virtual
outer positions with empty alphabets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .words import (
    EMPTY,
    Letter,
    Word,
    fmt_letter,
    fmt_word,
    inv,
    is_reduced,
    mul,
    reduce_letters,
)

RuleElem = tuple[str, int]  # (rule id, sign)


class MachineError(Exception):
    """Base class for machine-level failures."""


class NotAdmissible(MachineError):
    def __init__(self, msg: str, *, part: str | None = None, sector: int | None = None):
        detail = msg
        if part is not None:
            detail += f" [part {part}]"
        if sector is not None:
            detail += f" [sector {sector}]"
        super().__init__(detail)
        self.part = part
        self.sector = sector


class NotNormalizable(MachineError):
    pass


class FailsAtStep(MachineError):
    def __init__(self, index: int, elem: RuleElem, cause: str):
        super().__init__(f"step {index} ({fmt_elem(elem)}): {cause}")
        self.index = index
        self.elem = elem
        self.cause = cause


def fmt_elem(elem: RuleElem) -> str:
    rid, sign = elem
    return rid if sign == 1 else rid + "^-1"


def parse_elem(text: str) -> RuleElem:
    if text.endswith("^-1"):
        return (text[:-3], -1)
    return (text, 1)


def inv_elem(elem: RuleElem) -> RuleElem:
    return (elem[0], -elem[1])


def inv_history(history: Sequence[RuleElem]) -> tuple[RuleElem, ...]:
    return tuple(inv_elem(e) for e in reversed(history))


@dataclass(frozen=True)
class Part:
    """One part of the state alphabet, with optional start/end letters."""

    name: str
    letters: tuple[str, ...]
    start: str | None = None
    end: str | None = None

    def __post_init__(self) -> None:
        if not self.letters:
            raise ValueError(f"part {self.name} has no letters")
        for s in (self.start, self.end):
            if s is not None and s not in self.letters:
                raise ValueError(f"{s!r} is not a letter of part {self.name}")


class Hardware:
    """Parts plus per-sector tape alphabets."""

    __slots__ = (
        "parts",
        "sector_alphabets",
        "cyclic",
        "nparts",
        "part_index",
        "part_of",
        "sector_of_a",
    )

    def __init__(
        self,
        parts: Sequence[Part],
        sector_alphabets: Sequence[Iterable[str]],
        cyclic: bool = False,
    ):
        self.parts = tuple(parts)
        self.cyclic = cyclic
        self.nparts = len(self.parts)
        expected = self.nparts if cyclic else self.nparts - 1
        alphabets = tuple(frozenset(a) for a in sector_alphabets)
        if len(alphabets) != expected:
            raise ValueError(
                f"expected {expected} sector alphabets, got {len(alphabets)}"
            )
        self.sector_alphabets = alphabets
        self.part_index: dict[str, int] = {}
        self.part_of: dict[str, int] = {}
        seen: set[str] = set()
        for i, p in enumerate(self.parts):
            if p.name in self.part_index:
                raise ValueError(f"duplicate part name {p.name}")
            self.part_index[p.name] = i
            for q in p.letters:
                if q in seen:
                    raise ValueError(f"duplicate state letter {q}")
                seen.add(q)
                self.part_of[q] = i
        self.sector_of_a: dict[str, int] = {}
        for sid0, alpha in enumerate(alphabets, start=1):
            for a in alpha:
                if a in seen or a in self.sector_of_a:
                    raise ValueError(f"duplicate symbol {a}")
                self.sector_of_a[a] = sid0

    @property
    def nsectors(self) -> int:
        return len(self.sector_alphabets)

    def alphabet(self, sid: int) -> frozenset[str]:
        if 1 <= sid <= len(self.sector_alphabets):
            return self.sector_alphabets[sid - 1]
        return frozenset()

    def sector_left_of(self, p: int) -> int:
        if p >= 1:
            return p
        return self.nparts if self.cyclic else 0

    def sector_right_of(self, p: int) -> int:
        return p + 1

    def sector_parts(self, sid: int) -> tuple[int, int]:
        """(left part, right part) of an interior or wrap sector."""
        if not 1 <= sid <= self.nsectors:
            raise ValueError(f"no sector {sid}")
        return sid - 1, sid % self.nparts

    def window_sector(self, a: Letter, b: Letter) -> int | None:
        """Sector of the tape word between consecutive state letters, or None."""
        pa, sa = self.part_of[a[0]], a[1]
        pb, sb = self.part_of[b[0]], b[1]
        if sa == 1 and sb == 1:
            sid = pa + 1
            if sid <= self.nsectors and sid % self.nparts == pb:
                return sid
            return None
        if sa == -1 and sb == -1:
            sid = self.sector_left_of(pa)
            if 1 <= sid <= self.nsectors and sid - 1 == pb:
                return sid
            return None
        if sa == 1 and sb == -1:
            if pa != pb:
                return None
            sid = pa + 1
            return sid if sid <= self.nsectors else None
        if pa != pb:
            return None
        sid = self.sector_left_of(pa)
        return sid if 1 <= sid <= self.nsectors else None

    def standard_base(self) -> tuple[tuple[int, int], ...]:
        return tuple((i, 1) for i in range(self.nparts))


class AdmissibleWord:
    """Alternating state letters and sector tape words, freely reduced."""

    __slots__ = ("hw", "qs", "tapes", "sectors", "_hash")

    def __init__(
        self,
        hw: Hardware,
        qs: Sequence[Letter],
        tapes: Sequence[Word],
        sectors: tuple[int, ...] | None = None,
    ):
        qs = tuple(qs)
        tapes = tuple(tuple(t) for t in tapes)
        if not qs:
            raise NotAdmissible("a word must contain at least one state letter")
        if len(tapes) != len(qs) - 1:
            raise NotAdmissible(
                f"{len(qs)} state letters need {len(qs) - 1} tape words, got {len(tapes)}"
            )
        if sectors is None:
            sectors = _validate_windows(hw, qs, tapes)
        self.hw = hw
        self.qs = qs
        self.tapes = tapes
        self.sectors = sectors
        self._hash = hash((qs, tapes))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, AdmissibleWord)
            and self._hash == other._hash
            and self.qs == other.qs
            and self.tapes == other.tapes
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"<{fmt_admissible(self)}>"

    @property
    def q_len(self) -> int:
        return len(self.qs)

    @property
    def a_len(self) -> int:
        return sum(len(t) for t in self.tapes)

    @property
    def norm(self) -> int:
        """Combinatorial length: state letters plus tape letters."""
        return self.q_len + self.a_len

    def base(self) -> tuple[tuple[int, int], ...]:
        return tuple((self.hw.part_of[q[0]], q[1]) for q in self.qs)

    def base_names(self) -> tuple[tuple[str, int], ...]:
        return tuple((self.hw.parts[p].name, s) for p, s in self.base())

    def letters(self) -> Iterator[Letter]:
        for i, q in enumerate(self.qs):
            yield q
            if i < len(self.tapes):
                yield from self.tapes[i]

    def subword(self, lo: int, hi: int) -> "AdmissibleWord":
        """Admissible subword spanning state letters [lo, hi)."""
        if not 0 <= lo < hi <= len(self.qs):
            raise ValueError("bad subword range")
        return AdmissibleWord(
            self.hw,
            self.qs[lo:hi],
            self.tapes[lo : hi - 1],
            self.sectors[lo : hi - 1],
        )

    def tape_in_sector(self, sid: int) -> Word:
        """Concatenation of the tape words lying in the given sector."""
        chunks = [t for t, s in zip(self.tapes, self.sectors) if s == sid]
        out: list[Letter] = []
        for c in chunks:
            out.extend(c)
        return tuple(out)


def _validate_windows(
    hw: Hardware, qs: tuple[Letter, ...], tapes: tuple[Word, ...]
) -> tuple[int, ...]:
    sectors = []
    for q in qs:
        if q[0] not in hw.part_of:
            raise NotAdmissible(f"unknown state letter {q[0]}")
    for i, t in enumerate(tapes):
        a, b = qs[i], qs[i + 1]
        sid = hw.window_sector(a, b)
        if sid is None:
            raise NotAdmissible(
                f"state letters {fmt_letter(a)} {fmt_letter(b)} are not adjacent"
            )
        if not t and a[0] == b[0] and a[1] == -b[1]:
            raise NotAdmissible(
                f"{fmt_letter(a)} {fmt_letter(b)} cancels: word not reduced"
            )
        if not is_reduced(t):
            raise NotAdmissible(f"tape word {fmt_word(t)} is not reduced", sector=sid)
        alpha = hw.alphabet(sid)
        for x in t:
            if x[0] not in alpha:
                raise NotAdmissible(
                    f"letter {fmt_letter(x)} does not belong to sector {sid}",
                    sector=sid,
                )
        sectors.append(sid)
    return tuple(sectors)


def fmt_admissible(w: AdmissibleWord) -> str:
    toks: list[str] = []
    for x in w.letters():
        toks.append(fmt_letter(x))
    return " ".join(toks)


def parse_admissible(hw: Hardware, text: str) -> AdmissibleWord:
    toks = text.split()
    qs: list[Letter] = []
    tapes: list[list[Letter]] = []
    for tok in toks:
        x = tok[:-3] if tok.endswith("^-1") else tok
        sign = -1 if tok.endswith("^-1") else 1
        if x in hw.part_of:
            qs.append((x, sign))
            tapes.append([])
        else:
            if not qs:
                raise NotAdmissible("word must start with a state letter")
            tapes[-1].append((x, sign))
    if not qs:
        raise NotAdmissible("word has no state letters")
    if tapes and tapes[-1]:
        raise NotAdmissible("word must end with a state letter")
    return AdmissibleWord(hw, qs, [tuple(t) for t in tapes[:-1]])


@dataclass(frozen=True)
class RulePart:
    """Rewrite of one part: ``frm -> left . to . right``."""

    frm: str
    to: str
    left: Word = EMPTY
    right: Word = EMPTY

    def __post_init__(self) -> None:
        if len(self.left) > 1 or len(self.right) > 1:
            raise ValueError("rule parts insert at most one letter per side")


@dataclass(frozen=True)
class Rule:
    """Normal-form rule: one RulePart per hardware part, plus locks/domains.

    ``locks`` is the set of sector ids the rule requires empty (their
    domains are empty).  Any other sector's domain is the full alphabet
    unless an explicit override is given.  ``tag`` is the rule's step
    letter; transition rules carry a distinct ``tag_inv`` for their
    inverse direction and a ``step_edge`` naming the steps they join.
    """

    rid: str
    sign: int
    parts: tuple[RulePart, ...]
    locks: frozenset[int] = frozenset()
    domain_overrides: tuple[tuple[int, frozenset[str]], ...] = ()
    tag: str = ""
    tag_inv: str = ""
    kind: str = "work"
    family: str = ""
    step_edge: tuple[str, str] | None = None

    @property
    def elem(self) -> RuleElem:
        return (self.rid, self.sign)

    def inverse(self) -> "Rule":
        edge = None
        if self.step_edge is not None:
            edge = (self.step_edge[1], self.step_edge[0])
        return Rule(
            rid=self.rid,
            sign=-self.sign,
            parts=tuple(
                RulePart(p.to, p.frm, inv(p.left), inv(p.right)) for p in self.parts
            ),
            locks=self.locks,
            domain_overrides=self.domain_overrides,
            tag=self.tag_inv or self.tag,
            tag_inv=self.tag if self.tag_inv else "",
            kind=self.kind,
            family=self.family,
            step_edge=edge,
        )

    def domain(self, hw: Hardware, sid: int) -> frozenset[str]:
        for s, d in self.domain_overrides:
            if s == sid:
                return d
        if sid in self.locks:
            return frozenset()
        return hw.alphabet(sid)


@dataclass(frozen=True)
class RawRule:
    """General-form rule: per-sector tape transformations ``u -> v``.

    Construction syntax only; ``normalize_raw_rule`` converts it to the
    executable normal form or reports that no normal form exists.  One
    letter of slack per sector side is inherently ambiguous (erasing a
    single letter could act at either end), so ``bias`` may name, per
    sector, which side carries the action: "left" attaches it to the left
    part's right word, "right" (the default) to the right part's left word.
    """

    rid: str
    qs: tuple[tuple[str, str], ...]
    sector_words: tuple[tuple[Word, Word], ...]
    locks: frozenset[int] = frozenset()
    bias: tuple[str | None, ...] | None = None
    tag: str = ""
    tag_inv: str = ""
    kind: str = "work"
    family: str = ""


def _split_sector_transform(u: Word, v: Word, bias: str | None) -> tuple[Word, Word]:
    """Find r, l with len<=1 and r*u*l == v in the free group."""
    candidates: list[Word] = []
    if bias == "left":
        if v:
            candidates.append((v[0],))
        if u:
            candidates.append(((u[0][0], -u[0][1]),))
        candidates.append(EMPTY)
    else:
        candidates.append(EMPTY)
        if v:
            candidates.append((v[0],))
        if u:
            candidates.append(((u[0][0], -u[0][1]),))
    if u == v:
        candidates.insert(0, EMPTY)
    for r in candidates:
        l = mul(inv(u), inv(r), v)
        if len(l) <= 1:
            return r, l
    raise NotNormalizable(
        f"sector transform {fmt_word(u)} -> {fmt_word(v)} is not one-letter-splittable"
    )


def normalize_raw_rule(hw: Hardware, raw: RawRule) -> Rule:
    if len(raw.qs) != hw.nparts:
        raise NotNormalizable(
            f"rule {raw.rid} covers {len(raw.qs)} parts, hardware has {hw.nparts}"
        )
    if len(raw.sector_words) != hw.nsectors:
        raise NotNormalizable(
            f"rule {raw.rid} lists {len(raw.sector_words)} sectors, hardware has {hw.nsectors}"
        )
    lefts: list[Word] = [EMPTY] * hw.nparts
    rights: list[Word] = [EMPTY] * hw.nparts
    for sid in range(1, hw.nsectors + 1):
        u, v = raw.sector_words[sid - 1]
        if sid in raw.locks:
            if u or v:
                raise NotNormalizable(
                    f"rule {raw.rid} locks sector {sid} but transforms its tape word"
                )
            continue
        lp, rp = hw.sector_parts(sid)
        bias = raw.bias[sid - 1] if raw.bias else None
        r, l = _split_sector_transform(tuple(u), tuple(v), bias)
        rights[lp] = r
        lefts[rp] = l
    parts = tuple(
        RulePart(frm, to, lefts[i], rights[i])
        for i, (frm, to) in enumerate(raw.qs)
    )
    return Rule(
        rid=raw.rid,
        sign=1,
        parts=parts,
        locks=raw.locks,
        tag=raw.tag,
        tag_inv=raw.tag_inv,
        kind=raw.kind,
        family=raw.family,
    )


class Machine:
    """Hardware plus an inverse-closed rule set (positives stored)."""

    def __init__(
        self,
        name: str,
        hardware: Hardware,
        rules: Sequence[Rule],
        input_sectors: Iterable[int] = (),
        a_projection: Mapping[str, str] | None = None,
        raw_rules: Sequence[RawRule] = (),
        meta: dict | None = None,
    ):
        self.name = name
        self.hardware = hardware
        self._positive: dict[str, Rule] = {}
        for r in rules:
            if r.sign != 1:
                raise ValueError(f"store positive rules only, got {fmt_elem(r.elem)}")
            if r.rid in self._positive:
                raise ValueError(f"duplicate rule id {r.rid}")
            self._positive[r.rid] = r
        self._negative: dict[str, Rule] = {}
        self.input_sectors = frozenset(input_sectors)
        self.a_projection = dict(a_projection) if a_projection else None
        self.raw_rules = tuple(raw_rules)
        self.meta = meta if meta is not None else {}

    @property
    def positive_rules(self) -> tuple[Rule, ...]:
        return tuple(self._positive.values())

    def rule(self, elem: RuleElem) -> Rule:
        rid, sign = elem
        if rid not in self._positive:
            raise KeyError(f"unknown rule {rid}")
        if sign == 1:
            return self._positive[rid]
        if rid not in self._negative:
            self._negative[rid] = self._positive[rid].inverse()
        return self._negative[rid]

    def elements(self) -> tuple[RuleElem, ...]:
        """All rule elements in the fixed global search order."""
        out: list[RuleElem] = []
        for rid in self._positive:
            out.append((rid, 1))
            out.append((rid, -1))
        return tuple(out)

    def step_tags(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for r in self._positive.values():
            seen.setdefault(r.tag)
        return tuple(seen)

    def word(self, text: str) -> AdmissibleWord:
        return parse_admissible(self.hardware, text)

    def start_letters(self) -> tuple[str, ...]:
        return tuple(_required(p.start, f"part {p.name} has no start letter") for p in self.hardware.parts)

    def end_letters(self) -> tuple[str, ...]:
        return tuple(_required(p.end, f"part {p.name} has no end letter") for p in self.hardware.parts)

    def accept_config(self) -> AdmissibleWord:
        qs = tuple((e, 1) for e in self.end_letters())
        return AdmissibleWord(self.hardware, qs, (EMPTY,) * (len(qs) - 1))

    def start_config(self, sector_words: Mapping[int, Word] | None = None) -> AdmissibleWord:
        qs = tuple((s, 1) for s in self.start_letters())
        tapes = []
        for i in range(len(qs) - 1):
            sid = i + 1
            tapes.append(tuple((sector_words or {}).get(sid, EMPTY)))
        return AdmissibleWord(self.hardware, qs, tapes)

    def input_config(self, w: Word) -> AdmissibleWord:
        """Start configuration with the copy of w in every input sector."""
        copies = self.meta.get("sector_copy")
        if copies is None:
            raise MachineError(f"machine {self.name} has no input-copy tables")
        words: dict[int, Word] = {}
        for sid in self.input_sectors:
            table = copies[sid]
            words[sid] = tuple((table[a], s) for a, s in w)
        return self.start_config(words)

    def validate(self) -> list[str]:
        """Machine well-formedness report; empty list means valid."""
        hw = self.hardware
        issues: list[str] = []
        for r in self._positive.values():
            if len(r.parts) != hw.nparts:
                issues.append(f"rule {r.rid}: {len(r.parts)} parts, hardware has {hw.nparts}")
                continue
            for i, p in enumerate(r.parts):
                for q in (p.frm, p.to):
                    if hw.part_of.get(q) != i:
                        issues.append(f"rule {r.rid}: {q} is not a letter of part {i}")
                for side, sid in (("left", hw.sector_left_of(i)), ("right", hw.sector_right_of(i))):
                    wrd = p.left if side == "left" else p.right
                    if not wrd:
                        continue
                    if sid in r.locks:
                        issues.append(
                            f"rule {r.rid}: inserts into locked sector {sid}"
                        )
                    dom = r.domain(hw, sid)
                    for x in wrd:
                        if x[0] not in dom:
                            issues.append(
                                f"rule {r.rid}: {side} letter {fmt_letter(x)} outside domain of sector {sid}"
                            )
            for sid, dom in r.domain_overrides:
                if (not dom) != (sid in r.locks):
                    issues.append(
                        f"rule {r.rid}: sector {sid} domain empty iff locked violated"
                    )
                if not dom <= hw.alphabet(sid):
                    issues.append(f"rule {r.rid}: domain of sector {sid} exceeds alphabet")
            inv_inv = r.inverse().inverse()
            if inv_inv != r:
                issues.append(f"rule {r.rid}: double inverse differs")
        if self.a_projection is not None:
            for sym in self.a_projection:
                if sym not in hw.sector_of_a:
                    issues.append(f"projection names unknown tape letter {sym}")
        return issues


def _required(x, msg: str):
    if x is None:
        raise MachineError(msg)
    return x


def is_theta_admissible(word: AdmissibleWord, rule: Rule) -> bool:
    """Total predicate: state letters match the rule, tape letters in domains."""
    hw = word.hw
    parts = rule.parts
    for sym, _sign in word.qs:
        if parts[hw.part_of[sym]].frm != sym:
            return False
    for t, sid in zip(word.tapes, word.sectors):
        if not t:
            continue
        dom = rule.domain(hw, sid)
        for x in t:
            if x[0] not in dom:
                return False
    return True


def _admissibility_error(word: AdmissibleWord, rule: Rule) -> NotAdmissible:
    hw = word.hw
    for sym, _sign in word.qs:
        p = hw.part_of[sym]
        if rule.parts[p].frm != sym:
            return NotAdmissible(
                f"state letter {sym} does not match rule {fmt_elem(rule.elem)}"
                f" (expects {rule.parts[p].frm})",
                part=hw.parts[p].name,
            )
    for t, sid in zip(word.tapes, word.sectors):
        dom = rule.domain(hw, sid)
        for x in t:
            if x[0] not in dom:
                return NotAdmissible(
                    f"tape letter {fmt_letter(x)} outside domain of rule {fmt_elem(rule.elem)}",
                    sector=sid,
                )
    return NotAdmissible(f"rule {fmt_elem(rule.elem)} not applicable")


def replacement(rule: Rule, hw: Hardware, q: Letter) -> Word:
    """The word a rule writes in place of one signed state letter."""
    p = rule.parts[hw.part_of[q[0]]]
    if q[1] == 1:
        return p.left + ((p.to, 1),) + p.right
    return inv(p.right) + ((p.to, -1),) + inv(p.left)


def apply_rule(word: AdmissibleWord, rule: Rule) -> AdmissibleWord:
    """The rewritten word, freely reduced.

    Insertions falling outside the first/last state letter belong to
    sectors the word does not carry and are dropped, so partial-base words
    rewrite exactly like restrictions of wider computations.
    """
    if not is_theta_admissible(word, rule):
        raise _admissibility_error(word, rule)
    hw = word.hw
    seq: list[Letter] = []
    last = len(word.qs) - 1
    for i, q in enumerate(word.qs):
        rep = list(replacement(rule, hw, q))
        qpos = next(j for j, x in enumerate(rep) if x[0] in hw.part_of)
        if i == 0:
            rep = rep[qpos:]
        if i == last:
            qpos2 = next(j for j, x in enumerate(rep) if x[0] in hw.part_of)
            rep = rep[: qpos2 + 1]
        seq.extend(rep)
        if i < last:
            seq.extend(word.tapes[i])
    red = reduce_letters(seq)
    lo, hi = 0, len(red)
    while lo < hi and red[lo][0] not in hw.part_of:
        lo += 1
    while hi > lo and red[hi - 1][0] not in hw.part_of:
        hi -= 1
    red = red[lo:hi]
    qs: list[Letter] = []
    tapes: list[list[Letter]] = []
    for x in red:
        if x[0] in hw.part_of:
            qs.append(x)
            tapes.append([])
        elif qs:
            tapes[-1].append(x)
    if not qs:
        raise NotAdmissible(
            f"rule {fmt_elem(rule.elem)} erased every state letter of the word"
        )
    return AdmissibleWord(hw, tuple(qs), tuple(tuple(t) for t in tapes[:-1]))


@dataclass(frozen=True)
class Computation:
    """A run: words[i] = words[0] after the first i rules, all sharing one base."""

    machine: Machine
    words: tuple[AdmissibleWord, ...]
    history: tuple[RuleElem, ...]

    @property
    def initial(self) -> AdmissibleWord:
        return self.words[0]

    @property
    def final(self) -> AdmissibleWord:
        return self.words[-1]

    @property
    def length(self) -> int:
        return len(self.history)

    def step_history(self) -> tuple[str, ...]:
        return step_history(self.machine, self.history)

    def __len__(self) -> int:
        return len(self.history)


def run(machine: Machine, word: AdmissibleWord, history: Sequence[RuleElem]) -> Computation:
    """Run a history, requiring every step applicable and base-preserving."""
    words = [word]
    base = word.base()
    for i, elem in enumerate(history):
        rule = machine.rule(elem)
        cur = words[-1]
        if not is_theta_admissible(cur, rule):
            raise FailsAtStep(i, elem, str(_admissibility_error(cur, rule)))
        nxt = apply_rule(cur, rule)
        if nxt.base() != base:
            raise FailsAtStep(i, elem, "application changes the base")
        words.append(nxt)
    return Computation(machine, tuple(words), tuple(history))


def applicable_elements(
    machine: Machine, word: AdmissibleWord, last: RuleElem | None = None
) -> list[RuleElem]:
    """Rule elements applicable at a word, skipping the inverse of ``last``."""
    out = []
    forbidden = inv_elem(last) if last is not None else None
    for elem in machine.elements():
        if elem == forbidden:
            continue
        if is_theta_admissible(word, machine.rule(elem)):
            out.append(elem)
    return out


def step_history(machine: Machine, history: Sequence[RuleElem]) -> tuple[str, ...]:
    """Factor a history into step letters: transitions verbatim, work runs merged."""
    out: list[str] = []
    prev_kind = ""
    for elem in history:
        r = machine.rule(elem)
        if r.kind == "transition":
            out.append(r.tag)
        else:
            if not out or prev_kind == "transition" or out[-1] != r.tag:
                out.append(r.tag)
        prev_kind = r.kind
    return tuple(out)


def canonical_step_history(machine: Machine, history: Sequence[RuleElem]) -> tuple[str, ...]:
    """Step history with forced transition letters omitted.

    A transition letter is dropped when it is wedged between work letters
    equal to the two steps it joins, since its presence is implied.
    """
    letters = step_history(machine, history)
    edges: dict[str, tuple[str, str]] = {}
    for r in machine.positive_rules:
        if r.kind == "transition" and r.step_edge is not None:
            edges[r.tag] = r.step_edge
            edges[r.tag_inv or r.tag] = (r.step_edge[1], r.step_edge[0])
    out: list[str] = []
    for i, t in enumerate(letters):
        e = edges.get(t)
        if (
            e is not None
            and 0 < i < len(letters) - 1
            and letters[i - 1] == e[0]
            and letters[i + 1] == e[1]
        ):
            continue
        out.append(t)
    return tuple(out)


def project_to_input(machine: Machine, word: AdmissibleWord) -> Word:
    """Freely reduced image under tape-letter -> input-letter, state -> 1."""
    proj = machine.a_projection
    if proj is None:
        raise MachineError(f"machine {machine.name} has no input projection")
    seq: list[Letter] = []
    for t in word.tapes:
        for sym, sign in t:
            seq.append((proj[sym], sign))
    return tuple(reduce_letters(seq))


def normalize_rules(machine: Machine) -> Machine:
    """Machine with any staged raw rules converted to normal form."""
    rules = list(machine.positive_rules)
    for raw in machine.raw_rules:
        rules.append(normalize_raw_rule(machine.hardware, raw))
    out = Machine(
        machine.name,
        machine.hardware,
        rules,
        machine.input_sectors,
        machine.a_projection,
        raw_rules=(),
        meta=machine.meta,
    )
    issues = out.validate()
    if issues:
        raise NotNormalizable("; ".join(issues))
    return out
