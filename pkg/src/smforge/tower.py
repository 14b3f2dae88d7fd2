"""The machine tower m1..m, its configurations, and canonical accepting runs.

All builders are parameterized by (alphabet, n, k, L).  Group-theoretic
conclusions downstream need n, k, L far larger than anything a desk run
can touch; the builders only require n >= 2, k >= 2, L >= 3 and the
machine-level laws are exercised empirically at those values.

Canonical accepting histories are emitted while running the engine, so a
construction bug surfaces as an inadmissible step instead of a wrong
frozen history.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .combinators import TransitionSpec, concatenate, cyclize, parallel
from .core import (
    EMPTY,
    AdmissibleWord,
    Hardware,
    Machine,
    MachineError,
    Part,
    Rule,
    RuleElem,
    RulePart,
    apply_rule,
)
from .words import Word, power


class MixedCoordinates(MachineError):
    pass


class InvalidParams(MachineError):
    pass


@dataclass(frozen=True)
class TowerParams:
    alphabet: tuple[str, ...]
    n: int = 2
    k: int = 3
    L: int = 3

    def __post_init__(self) -> None:
        if not self.alphabet or len(set(self.alphabet)) != len(self.alphabet):
            raise InvalidParams("alphabet must be nonempty without repeats")
        if self.n < 2:
            raise InvalidParams("exponent n must be >= 2")
        if self.k < 2:
            raise InvalidParams("repetition count k must be >= 2")
        if self.L < 3:
            raise InvalidParams("parallel count L must be >= 3")


def parse_params(text: str) -> TowerParams:
    """Parse the key=value parameter file (keys: alphabet, n, k, L)."""
    values: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParams(f"bad parameter line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val.strip("\"'")
    try:
        alphabet = tuple(values["alphabet"].replace(",", ""))
    except KeyError:
        raise InvalidParams("missing key: alphabet")
    return TowerParams(
        alphabet=alphabet,
        n=int(values.get("n", 2)),
        k=int(values.get("k", 3)),
        L=int(values.get("L", 3)),
    )


# ---------------------------------------------------------------------------
# m1


def _phase_spec(i: int, n: int) -> tuple[list[tuple[int, str, int]], set[int]]:
    """Per-letter tape effects of phase i of m1.

    Effects are (sector, end|start, sign): 'end' inserts at the right end
    of the sector's word, 'start' at the left end.
    """
    if i == 1:
        return [(1, "end", -1), (3, "start", 1)], {2, 4}
    if i == 2 * n - 1:
        return [(1, "end", -1), (2, "end", -1), (3, "start", 1), (4, "end", -1)], set()
    if i == 2 * n:
        return [(3, "start", -1), (4, "end", 1)], {1, 2}
    if i % 2 == 0:
        return [(2, "end", 1), (3, "start", -1)], {4}
    return [(1, "end", -1), (2, "end", -1), (3, "start", 1)], {4}


def _sigma_locks(i: int, n: int) -> set[int]:
    if i == 1:
        return {2, 4}
    if i == 2 * n - 1:
        return {1, 2}
    return {3, 4} if i % 2 == 0 else {2, 4}


def _inserts_to_words(
    inserts: Iterable[tuple[int, str, int]],
    letter_of_sector: Callable[[int], str],
    secmap: Callable[[int], int],
) -> tuple[dict[int, Word], dict[int, Word]]:
    """Left/right insertion words per part index for one tape letter."""
    lefts: dict[int, Word] = {}
    rights: dict[int, Word] = {}
    for s, where, sign in inserts:
        sid = secmap(s)
        sym = letter_of_sector(sid)
        if where == "end":
            lefts[sid] = ((sym, sign),)  # left word of the part right of the sector
        else:
            rights[sid - 1] = ((sym, sign),)  # right word of the part left of it
    return lefts, rights


def build_m1(alphabet: Sequence[str], n: int) -> Machine:
    """Square detector: accepts exactly the inputs u**n, one phase per pass."""
    if n < 2:
        raise InvalidParams("n must be >= 2")
    alphabet = tuple(alphabet)
    if not alphabet:
        raise InvalidParams("alphabet must be nonempty")
    parts = []
    for x in range(5):
        letters = tuple(f"q{x}({j})" for j in range(1, 2 * n + 1))
        parts.append(Part(f"Q{x}", letters, letters[0], letters[-1]))
    alphabets = [[f"{a}_{s}" for a in alphabet] for s in range(1, 5)]
    hw = Hardware(parts, alphabets)
    rules: list[Rule] = []
    for i in range(1, 2 * n + 1):
        inserts, locks = _phase_spec(i, n)
        for a in alphabet:
            lefts, rights = _inserts_to_words(
                inserts, lambda sid: f"{a}_{sid}", lambda s: s
            )
            rparts = tuple(
                RulePart(
                    f"q{x}({i})",
                    f"q{x}({i})",
                    lefts.get(x, EMPTY),
                    rights.get(x, EMPTY),
                )
                for x in range(5)
            )
            rules.append(
                Rule(
                    rid=f"tau_{i}({a})",
                    sign=1,
                    parts=rparts,
                    locks=frozenset(locks),
                    tag=f"({i})",
                    family="tau",
                )
            )
        if i < 2 * n:
            rules.append(
                Rule(
                    rid=f"sigma({i},{i + 1})",
                    sign=1,
                    parts=tuple(
                        RulePart(f"q{x}({i})", f"q{x}({i + 1})") for x in range(5)
                    ),
                    locks=frozenset(_sigma_locks(i, n)),
                    tag=f"({i},{i + 1})",
                    tag_inv=f"({i + 1},{i})",
                    kind="transition",
                    family="sigma",
                    step_edge=(f"({i})", f"({i + 1})"),
                )
            )
    m = Machine(
        "m1",
        hw,
        rules,
        input_sectors={1},
        a_projection={f"{a}_{s}": a for a in alphabet for s in range(1, 5)},
    )
    m.meta.update(
        builder="m1",
        n=n,
        alphabet=alphabet,
        sector_copy={s: {a: f"{a}_{s}" for a in alphabet} for s in range(1, 5)},
    )
    return m


def canonical_accepting_m1(machine: Machine, u: Word) -> tuple[RuleElem, ...]:
    """The accepting history for input u**n: 2n passes, odd ones right to left."""
    n = machine.meta["n"]
    h: list[RuleElem] = []
    for i in range(1, 2 * n + 1):
        letters = tuple(reversed(u)) if i % 2 == 1 else u
        h.extend((f"tau_{i}({x})", s) for x, s in letters)
        if i < 2 * n:
            h.append((f"sigma({i},{i + 1})", 1))
    return tuple(h)


# ---------------------------------------------------------------------------
# m2 / m3 submachine units

_M2_PART_NAMES = ("Q0", "P1", "Q1", "R1", "Q2", "R2", "Q3", "P4", "Q4")
_M2_SECMAP = {1: 1, 2: 4, 3: 6, 4: 7}  # m1 sector -> m2 sector


def _shape(alphabet: Sequence[str], with_p0: bool) -> tuple[tuple[str, ...], list[list[str]]]:
    names = (("P0",) if with_p0 else ()) + _M2_PART_NAMES
    nsec = len(names) - 1
    alphabets = [[f"{a}_{s}" for a in alphabet] for s in range(1, nsec + 1)]
    return names, alphabets


def _unit_parts(
    names: Sequence[str], key: str, special: dict[str, tuple[tuple[str, ...], str, str]] | None = None
) -> list[Part]:
    parts = []
    for pn in names:
        if special and pn in special:
            letters, st, en = special[pn]
        else:
            sym = f"{pn.lower()}[{key}]"
            letters, st, en = (sym,), sym, sym
        parts.append(Part(pn, letters, st, en))
    return parts


def _unit_even(
    names: Sequence[str],
    alphabets: list[list[str]],
    alphabet: Sequence[str],
    n: int,
    i: int,
    ofs: int,
) -> Machine:
    """Copy of phase i of m1, acting through the sector identification."""
    key = str(2 * i)
    parts = _unit_parts(names, key)
    hw = Hardware(parts, alphabets)
    always = {ofs + 2, ofs + 3, ofs + 5, ofs + 8}
    if ofs:
        always |= set(range(1, ofs + 1))
    inserts, locks = _phase_spec(i, n)
    rules = []
    for a in alphabet:
        lefts, rights = _inserts_to_words(
            inserts, lambda sid: f"{a}_{sid}", lambda s: _M2_SECMAP[s] + ofs
        )
        rparts = tuple(
            RulePart(
                p.letters[0], p.letters[0], lefts.get(x, EMPTY), rights.get(x, EMPTY)
            )
            for x, p in enumerate(parts)
        )
        rules.append(
            Rule(
                rid=f"tau_{i}({a})",
                sign=1,
                parts=rparts,
                locks=frozenset({_M2_SECMAP[s] + ofs for s in locks} | always),
                tag=f"({2 * i})",
                family="tau",
            )
        )
    return Machine(key, hw, rules)


def _unit_primitive(
    names: Sequence[str],
    alphabets: list[list[str]],
    alphabet: Sequence[str],
    *,
    key: str,
    mode: str,  # "lr" or "rl"
    run_part: str,
    triple: tuple[int, int, int],  # part indices the primitive occupies
    extra_unlocked: set[int],
    rid_fmt: str,
    tag: str,
) -> Machine:
    """Primitive machine embedded on three parts of the shared shape.

    ``triple`` = (left, running, right) part indices; the two sectors it
    acts on are the ones between them.  Everything not listed in
    ``extra_unlocked`` or under the primitive is locked by every rule.
    """
    p1 = f"{run_part.lower()}[{key}](1)"
    p2 = f"{run_part.lower()}[{key}](2)"
    parts = _unit_parts(names, key, {run_part: ((p1, p2), p1, p2)})
    hw = Hardware(parts, alphabets)
    _, mid, _ = triple
    s1, s2 = mid, mid + 1
    nsec = len(names) - 1
    base_locks = set(range(1, nsec + 1)) - {s1, s2} - extra_unlocked
    sym = [p.letters[0] for p in parts]

    def mk(frm: str, to: str, left: Word, right: Word) -> tuple[RulePart, ...]:
        out = []
        for x, p in enumerate(parts):
            if x == mid:
                out.append(RulePart(frm, to, left, right))
            else:
                out.append(RulePart(sym[x], sym[x]))
        return tuple(out)

    if mode == "lr":
        walk1 = lambda a: (((f"{a}_{s1}", -1),), ((f"{a}_{s2}", 1),))
        walk2 = lambda a: (((f"{a}_{s1}", 1),), ((f"{a}_{s2}", -1),))
        conn_lock = s1
    else:
        walk1 = lambda a: (((f"{a}_{s1}", 1),), ((f"{a}_{s2}", -1),))
        walk2 = lambda a: (((f"{a}_{s1}", -1),), ((f"{a}_{s2}", 1),))
        conn_lock = s2
    stem = "zeta" if mode == "lr" else "xi"
    rules = []
    for a in alphabet:
        l, r = walk1(a)
        rules.append(
            Rule(
                rid=rid_fmt.format(f"{stem}1({a})"),
                sign=1,
                parts=mk(p1, p1, l, r),
                locks=frozenset(base_locks),
                tag=tag,
                family=stem,
            )
        )
    rules.append(
        Rule(
            rid=rid_fmt.format(f"{stem}12"),
            sign=1,
            parts=mk(p1, p2, EMPTY, EMPTY),
            locks=frozenset(base_locks | {conn_lock}),
            tag=tag,
            family=f"{stem}-conn",
        )
    )
    for a in alphabet:
        l, r = walk2(a)
        rules.append(
            Rule(
                rid=rid_fmt.format(f"{stem}2({a})"),
                sign=1,
                parts=mk(p2, p2, l, r),
                locks=frozenset(base_locks),
                tag=tag,
                family=stem,
            )
        )
    return Machine(key, hw, rules)


def _unit_pair(
    names: Sequence[str],
    alphabets: list[list[str]],
    alphabet: Sequence[str],
    *,
    j: int,
    n: int,
    ofs: int,
) -> Machine:
    """One of the k twin-primitive blocks: an rl copy on (Q2,R2,Q3) fused
    with an lr copy on (Q3,P4,Q4) acting on mutually inverse words."""
    key = f"{4 * n - 1}_{j}"
    r1, r2 = f"r2[{key}](1)", f"r2[{key}](2)"
    f1, f2 = f"p4[{key}](1)", f"p4[{key}](2)"
    parts = _unit_parts(
        names, key, {"R2": ((r1, r2), r1, r2), "P4": ((f1, f2), f1, f2)}
    )
    hw = Hardware(parts, alphabets)
    nsec = len(names) - 1
    sR, sF = ofs + 5, ofs + 7  # sectors (sR, sR+1) and (sF, sF+1)
    base_locks = set(range(1, nsec + 1)) - {sR, sR + 1, sF, sF + 1}
    ridx = names.index("R2")
    fidx = names.index("P4")
    sym = [p.letters[0] for p in parts]

    def mk(rfrm, rto, rl, rr, ffrm, fto, fl, fr):
        out = []
        for x in range(len(parts)):
            if x == ridx:
                out.append(RulePart(rfrm, rto, rl, rr))
            elif x == fidx:
                out.append(RulePart(ffrm, fto, fl, fr))
            else:
                out.append(RulePart(sym[x], sym[x]))
        return tuple(out)

    rules = []
    for a in alphabet:
        rules.append(
            Rule(
                rid=f"pair1({a})[{j}]",
                sign=1,
                parts=mk(
                    r1, r1, ((f"{a}_{sR}", 1),), ((f"{a}_{sR + 1}", -1),),
                    f1, f1, ((f"{a}_{sF}", 1),), ((f"{a}_{sF + 1}", -1),),
                ),
                locks=frozenset(base_locks),
                tag=f"({4 * n - 1})",
                family="pair",
            )
        )
    rules.append(
        Rule(
            rid=f"pair12[{j}]",
            sign=1,
            parts=mk(r1, r2, EMPTY, EMPTY, f1, f2, EMPTY, EMPTY),
            locks=frozenset(base_locks | {sR + 1, sF}),
            tag=f"({4 * n - 1})",
            family="pair-conn",
        )
    )
    for a in alphabet:
        rules.append(
            Rule(
                rid=f"pair2({a})[{j}]",
                sign=1,
                parts=mk(
                    r2, r2, ((f"{a}_{sR}", -1),), ((f"{a}_{sR + 1}", 1),),
                    f2, f2, ((f"{a}_{sF}", -1),), ((f"{a}_{sF + 1}", 1),),
                ),
                locks=frozenset(base_locks),
                tag=f"({4 * n - 1})",
                family="pair",
            )
        )
    return Machine(key, hw, rules)


def _unit_head(names, alphabets, alphabet) -> Machine:
    """The input-shuffling head: moves the input word one sector right."""
    parts = _unit_parts(names, "1")
    hw = Hardware(parts, alphabets)
    nsec = len(names) - 1
    sym = [p.letters[0] for p in parts]
    rules = []
    for a in alphabet:
        rparts = tuple(
            RulePart(
                sym[x],
                sym[x],
                ((f"{a}_1", -1),) if names[x] == "Q0" else EMPTY,
                ((f"{a}_2", 1),) if names[x] == "Q0" else EMPTY,
            )
            for x in range(len(parts))
        )
        rules.append(
            Rule(
                rid=f"rho({a})[1]",
                sign=1,
                parts=rparts,
                locks=frozenset(range(3, nsec + 1)),
                tag="(1)",
                family="rho",
            )
        )
    return Machine("1", hw, rules)


def _m2_units_and_transitions(
    alphabet: Sequence[str], n: int, k: int, with_p0: bool
) -> tuple[list[Machine], list[TransitionSpec]]:
    names, alphabets = _shape(alphabet, with_p0)
    ofs = 1 if with_p0 else 0
    pidx = {pn: x for x, pn in enumerate(names)}
    units: list[Machine] = []
    specs: list[TransitionSpec] = []
    if with_p0:
        units.append(_unit_head(names, alphabets, alphabet))
    for i in range(1, 2 * n + 1):
        units.append(_unit_even(names, alphabets, alphabet, n, i, ofs))
        m = 2 * i + 1
        if m >= 4 * n - 1:
            break
        extra = {ofs + 6} if m % 4 == 3 else {ofs + 4}
        units.append(
            _unit_primitive(
                names, alphabets, alphabet,
                key=f"{m}-", mode="lr", run_part="P1",
                triple=(pidx["Q0"], pidx["P1"], pidx["Q1"]),
                extra_unlocked=extra,
                rid_fmt=f"{{}}[{m}]", tag=f"({m})",
            )
        )
        if m % 4 == 3:
            triple = (pidx["Q2"], pidx["R2"], pidx["Q3"])
        else:
            triple = (pidx["Q1"], pidx["R1"], pidx["Q2"])
        units.append(
            _unit_primitive(
                names, alphabets, alphabet,
                key=f"{m}+", mode="rl",
                run_part=names[triple[1]],
                triple=triple,
                extra_unlocked={ofs + 1},
                rid_fmt=f"{{}}[{m}]", tag=f"({m})",
            )
        )
    for j in range(1, k + 1):
        units.append(_unit_pair(names, alphabets, alphabet, j=j, n=n, ofs=ofs))
    units.append(_unit_even(names, alphabets, alphabet, n, 2 * n, ofs))

    # Transition specs between consecutive units.  Work-step indices: unit
    # "1" (head), even units "2i", primitive halves "m-"/"m+" inside step m,
    # pair blocks inside step 4n-1.
    def step_of(unit: Machine) -> int:
        key = unit.name
        if key.endswith("-") or key.endswith("+"):
            return int(key[:-1])
        if "_" in key:
            return 4 * n - 1
        return int(key)

    nsec = len(names) - 1
    all_sectors = set(range(1, nsec + 1))
    for a, b in zip(units, units[1:]):
        sa, sb = step_of(a), step_of(b)
        if sa == sb:
            if a.name.endswith("-"):
                # connecting transition inside an odd step: same locks as the
                # transition entering the step
                prev = units[units.index(a) - 1]
                locks = frozenset(
                    _common_locks(prev) | (_common_locks(a) & _common_locks_next(units, a))
                )
                specs.append(
                    TransitionSpec(
                        rid=f"chi[{sa}]", frm=a.name, to=b.name,
                        locks=locks, tag=f"({sa})", family="chi", kind="work",
                    )
                )
            else:
                jj = int(a.name.split("_")[1])
                specs.append(
                    TransitionSpec(
                        rid=f"chi({jj},{jj + 1})", frm=a.name, to=b.name,
                        locks=frozenset(all_sectors - {ofs + 6, ofs + 7}),
                        tag=f"({sa})", family="chi", kind="work",
                    )
                )
        else:
            if with_p0 and sa == 1:
                locks = frozenset(all_sectors - {ofs + 1})
            else:
                locks = None
            specs.append(
                TransitionSpec(
                    rid=f"theta({sa},{sb})", frm=a.name, to=b.name,
                    locks=locks, tag=f"({sa},{sb})", tag_inv=f"({sb},{sa})",
                    family="theta",
                )
            )
    return units, specs


def _common_locks(machine: Machine) -> set[int]:
    rules = machine.positive_rules
    out = set(rules[0].locks)
    for r in rules[1:]:
        out &= r.locks
    return out


def _common_locks_next(units: list[Machine], a: Machine) -> set[int]:
    return _common_locks(units[units.index(a) + 1])


def _finish_tower_machine(
    m: Machine, *, builder: str, alphabet, n: int, k: int, ofs: int
) -> Machine:
    nsec = m.hardware.nsectors
    m.a_projection = {f"{a}_{s}": a for a in alphabet for s in range(1, nsec + 1)}
    m.meta["sector_copy"] = {
        s: {a: f"{a}_{s}" for a in alphabet} for s in range(1, nsec + 1)
    }
    m.meta.update(builder=builder, n=n, k=k, alphabet=tuple(alphabet), m2_ofs=ofs)
    return m


def build_m2(alphabet: Sequence[str], n: int, k: int) -> Machine:
    units, specs = _m2_units_and_transitions(alphabet, n, k, with_p0=False)
    m = concatenate(units, specs, name="m2", input_sectors={1})
    return _finish_tower_machine(m, builder="m2", alphabet=alphabet, n=n, k=k, ofs=0)


def build_m3(alphabet: Sequence[str], n: int, k: int) -> Machine:
    units, specs = _m2_units_and_transitions(alphabet, n, k, with_p0=True)
    m = concatenate(units, specs, name="m3", input_sectors={1})
    return _finish_tower_machine(m, builder="m3", alphabet=alphabet, n=n, k=k, ofs=1)


def build_m4(alphabet: Sequence[str], n: int, k: int) -> Machine:
    m3 = build_m3(alphabet, n, k)
    m = cyclize(m3, "T", name="m4")
    m.meta.update(builder="m4", n=n, k=k, alphabet=tuple(alphabet), m2_ofs=2)
    return m


def _build_m5(alphabet, n: int, k: int, L: int, second: bool) -> Machine:
    m4 = build_m4(alphabet, n, k)
    locks = [(1, 2)] if second else []  # special input sector of copy 1
    name = "m52" if second else "m51"
    m = parallel(m4, L, locks, name=name)
    m.meta.update(
        builder=name, n=n, k=k, L=L, alphabet=tuple(alphabet),
        m2_ofs=2, parts_per_copy=m4.hardware.nparts, special_sector=2,
        read_copy=2,
    )
    return m


def build_m51(alphabet, n: int, k: int, L: int) -> Machine:
    return _build_m5(alphabet, n, k, L, second=False)


def build_m52(alphabet, n: int, k: int, L: int) -> Machine:
    return _build_m5(alphabet, n, k, L, second=True)


def build_m(alphabet, n: int, k: int, L: int) -> Machine:
    """The two-lane machine: lane 1 runs on all inputs, lane 2 with the
    special input sector held empty; fresh start/end letters glue them."""
    m51 = build_m51(alphabet, n, k, L)
    m52 = build_m52(alphabet, n, k, L)
    hw5 = m51.hardware
    ppc = m51.meta["parts_per_copy"]

    def rename(sym: str, lane: int) -> str:
        if sym.startswith("t@"):
            return sym
        return f"{sym}~{lane}"

    parts = []
    for idx, p in enumerate(hw5.parts):
        if len(p.letters) == 1 and p.letters[0].startswith("t@"):
            parts.append(p)
            continue
        letters = (
            tuple(rename(x, 1) for x in p.letters)
            + tuple(rename(x, 2) for x in m52.hardware.parts[idx].letters)
            + (f"s@{p.name}", f"e@{p.name}")
        )
        parts.append(Part(p.name, letters, f"s@{p.name}", f"e@{p.name}"))
    hw = Hardware(parts, hw5.sector_alphabets, cyclic=True)
    rules: list[Rule] = []
    for lane, m5 in ((1, m51), (2, m52)):
        for r in m5.positive_rules:
            rules.append(
                Rule(
                    rid=f"m{lane}:{r.rid}",
                    sign=1,
                    parts=tuple(
                        RulePart(
                            rename(p.frm, lane), rename(p.to, lane), p.left, p.right
                        )
                        for p in r.parts
                    ),
                    locks=r.locks,
                    domain_overrides=r.domain_overrides,
                    tag=f"{r.tag}_{lane}",
                    tag_inv=f"{r.tag_inv}_{lane}" if r.tag_inv else "",
                    kind=r.kind,
                    family=r.family,
                    step_edge=(
                        (f"{r.step_edge[0]}_{lane}", f"{r.step_edge[1]}_{lane}")
                        if r.step_edge
                        else None
                    ),
                )
            )
    nsec = hw.nsectors
    all_sectors = frozenset(range(1, nsec + 1))
    inputs = frozenset(m51.input_sectors)
    special = 2
    for lane, m5 in ((1, m51), (2, m52)):
        unlocked = inputs if lane == 1 else inputs - {special}
        rules.append(
            Rule(
                rid=f"theta(s)_{lane}",
                sign=1,
                parts=tuple(
                    RulePart(
                        p.start if p.start.startswith("t@") else f"s@{p.name}",
                        rename(m5.hardware.parts[i].start, lane),
                    )
                    for i, p in enumerate(hw.parts)
                ),
                locks=all_sectors - unlocked,
                tag=f"(s)_{lane}",
                tag_inv=f"(s)_{lane}^-1",
                kind="transition",
                family="theta-s",
            )
        )
        rules.append(
            Rule(
                rid=f"theta(a)_{lane}",
                sign=1,
                parts=tuple(
                    RulePart(
                        rename(m5.hardware.parts[i].end, lane),
                        p.end if p.end.startswith("t@") else f"e@{p.name}",
                    )
                    for i, p in enumerate(hw.parts)
                ),
                locks=all_sectors,
                tag=f"(a)_{lane}",
                tag_inv=f"(a)_{lane}^-1",
                kind="transition",
                family="theta-a",
            )
        )
    m = Machine(
        "m",
        hw,
        rules,
        input_sectors=inputs,
        a_projection=dict(m51.a_projection),
    )
    m.meta["sector_copy"] = {
        s: dict(t) for s, t in m51.meta["sector_copy"].items()
    }
    coords5 = m51.meta["coords"]
    qmap: dict[str, tuple[int, str]] = {}
    for sym, (c, orig) in coords5["q"].items():
        if sym.startswith("t@"):
            qmap[sym] = (c, orig)
        else:
            qmap[rename(sym, 1)] = (c, f"{orig}~1")
            qmap[rename(sym, 2)] = (c, f"{orig}~2")
    for idx, p in enumerate(hw.parts):
        c, orig_part = coords5["part"][p.name]
        if p.start and p.start.startswith("s@"):
            qmap[f"s@{p.name}"] = (c, f"s@{orig_part}")
            qmap[f"e@{p.name}"] = (c, f"e@{orig_part}")
    m.meta["coords"] = {
        "copies": L,
        "parts_per_copy": ppc,
        "part": dict(coords5["part"]),
        "q": qmap,
        "a": dict(coords5["a"]),
    }
    m.meta.update(
        builder="m", n=n, k=k, L=L, alphabet=tuple(alphabet),
        m2_ofs=2, parts_per_copy=ppc, special_sector=special, read_copy=2,
    )
    return m


_BUILDERS: dict[str, Callable[..., Machine]] = {
    "m1": lambda p: build_m1(p.alphabet, p.n),
    "m2": lambda p: build_m2(p.alphabet, p.n, p.k),
    "m3": lambda p: build_m3(p.alphabet, p.n, p.k),
    "m4": lambda p: build_m4(p.alphabet, p.n, p.k),
    "m51": lambda p: build_m51(p.alphabet, p.n, p.k, p.L),
    "m52": lambda p: build_m52(p.alphabet, p.n, p.k, p.L),
    "m": lambda p: build_m(p.alphabet, p.n, p.k, p.L),
}


def build(name: str, params: TowerParams) -> Machine:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise InvalidParams(f"unknown machine {name!r}; expected one of {sorted(_BUILDERS)}")
    return builder(params)


# ---------------------------------------------------------------------------
# configurations


def config_i(machine: Machine, w: Word) -> AdmissibleWord:
    """Start configuration with the copy of w in every input sector."""
    return machine.input_config(w)


def config_j(machine: Machine, w: Word) -> AdmissibleWord:
    """config_i with the special input sector emptied."""
    special = machine.meta.get("special_sector")
    if special is None:
        raise MachineError(f"machine {machine.name} has no special input sector")
    cfg = machine.input_config(w)
    tapes = list(cfg.tapes)
    tapes[special - 1] = EMPTY
    return AdmissibleWord(machine.hardware, cfg.qs, tapes)


def accept_config(machine: Machine) -> AdmissibleWord:
    return machine.accept_config()


# ---------------------------------------------------------------------------
# canonical accepting histories (engine-driven)


class _Emitter:
    def __init__(self, machine: Machine, start: AdmissibleWord):
        self.machine = machine
        self.word = start
        self.history: list[RuleElem] = []

    def emit(self, elem: RuleElem) -> None:
        self.word = apply_rule(self.word, self.machine.rule(elem))
        self.history.append(elem)

    def sector_word(self, sid: int) -> Word:
        proj = self.machine.a_projection
        return tuple((proj[x], s) for x, s in self.word.tape_in_sector(sid))


def _emit_m2_body(em: _Emitter, u: Word, *, n: int, k: int, sec, rid) -> None:
    for i in range(1, 2 * n + 1):
        letters = tuple(reversed(u)) if i % 2 == 1 else u
        for x, s in letters:
            em.emit((rid(f"tau_{i}({x})"), s))
        if i == 2 * n:
            break
        m = 2 * i + 1
        em.emit((rid(f"theta({2 * i},{m})"), 1))
        if m < 4 * n - 1:
            w = em.sector_word(sec(1))
            for x, s in reversed(w):
                em.emit((rid(f"zeta1({x})[{m}]"), s))
            em.emit((rid(f"zeta12[{m}]"), 1))
            for x, s in w:
                em.emit((rid(f"zeta2({x})[{m}]"), s))
            em.emit((rid(f"chi[{m}]"), 1))
            v_sector = sec(6) if m % 4 == 3 else sec(4)
            v = em.sector_word(v_sector)
            for x, s in v:
                em.emit((rid(f"xi1({x})[{m}]"), s))
            em.emit((rid(f"xi12[{m}]"), 1))
            for x, s in reversed(v):
                em.emit((rid(f"xi2({x})[{m}]"), s))
            em.emit((rid(f"theta({m},{m + 1})"), 1))
        else:
            v = em.sector_word(sec(6))
            for j in range(1, k + 1):
                for x, s in v:
                    em.emit((rid(f"pair1({x})[{j}]"), s))
                em.emit((rid(f"pair12[{j}]"), 1))
                for x, s in reversed(v):
                    em.emit((rid(f"pair2({x})[{j}]"), s))
                if j < k:
                    em.emit((rid(f"chi({j},{j + 1})"), 1))
            em.emit((rid(f"theta({m},{m + 1})"), 1))


def _finish(em: _Emitter, expect: AdmissibleWord) -> tuple[RuleElem, ...]:
    if em.word != expect:
        raise MachineError("canonical history did not reach the expected word")
    return tuple(em.history)


def canonical_accepting_m2(machine: Machine, u: Word) -> tuple[RuleElem, ...]:
    n, k = machine.meta["n"], machine.meta["k"]
    em = _Emitter(machine, machine.input_config(power(u, n)))
    _emit_m2_body(em, u, n=n, k=k, sec=lambda s: s, rid=lambda r: r)
    return _finish(em, machine.accept_config())


def _canonical_m3_like(
    machine: Machine, u: Word, start: AdmissibleWord, *, rid, sec
) -> _Emitter:
    n, k = machine.meta["n"], machine.meta["k"]
    em = _Emitter(machine, start)
    for x, s in reversed(power(u, n)):
        em.emit((rid(f"rho({x})[1]"), s))
    em.emit((rid("theta(1,2)"), 1))
    _emit_m2_body(em, u, n=n, k=k, sec=sec, rid=rid)
    return em


def canonical_accepting_m3(machine: Machine, u: Word) -> tuple[RuleElem, ...]:
    ofs = machine.meta["m2_ofs"]
    em = _canonical_m3_like(
        machine, u, machine.input_config(power(u, machine.meta["n"])),
        rid=lambda r: r, sec=lambda s: s + ofs,
    )
    return _finish(em, machine.accept_config())


def canonical_accepting_m4(machine: Machine, u: Word) -> tuple[RuleElem, ...]:
    return canonical_accepting_m3(machine, u)


def _m5_read_sec(machine: Machine):
    ppc = machine.meta["parts_per_copy"]
    copy = machine.meta["read_copy"]
    ofs = machine.meta["m2_ofs"]
    return lambda s: ppc * (copy - 1) + ofs + s


def canonical_accepting_m5(machine: Machine, u: Word) -> tuple[RuleElem, ...]:
    n = machine.meta["n"]
    start = (
        config_j(machine, power(u, n))
        if machine.meta["builder"] == "m52"
        else machine.input_config(power(u, n))
    )
    em = _canonical_m3_like(machine, u, start, rid=lambda r: r, sec=_m5_read_sec(machine))
    return _finish(em, machine.accept_config())


def canonical_accepting_m(
    machine: Machine, u: Word, lane: int
) -> tuple[RuleElem, ...]:
    """One-lane accepting history: lane 1 from config_i, lane 2 from config_j."""
    if lane not in (1, 2):
        raise InvalidParams("lane must be 1 or 2")
    n = machine.meta["n"]
    start = config_i(machine, power(u, n)) if lane == 1 else config_j(machine, power(u, n))
    em = _Emitter(machine, start)
    em.emit((f"theta(s)_{lane}", 1))
    for x, s in reversed(power(u, n)):
        em.emit((f"m{lane}:rho({x})[1]", s))
    em.emit((f"m{lane}:theta(1,2)", 1))
    _emit_m2_body(
        em, u, n=n, k=machine.meta["k"],
        sec=_m5_read_sec(machine), rid=lambda r: f"m{lane}:{r}",
    )
    em.emit((f"theta(a)_{lane}", 1))
    return _finish(em, machine.accept_config())


def canonical_accepting(machine: Machine, u: Word, lane: int = 1) -> tuple[RuleElem, ...]:
    b = machine.meta.get("builder")
    if b == "m1":
        return canonical_accepting_m1(machine, u)
    if b == "m2":
        return canonical_accepting_m2(machine, u)
    if b in ("m3", "m4"):
        return canonical_accepting_m3(machine, u)
    if b in ("m51", "m52"):
        return canonical_accepting_m5(machine, u)
    if b == "m":
        return canonical_accepting_m(machine, u, lane)
    raise MachineError(f"no canonical accepting history for machine {machine.name}")


# ---------------------------------------------------------------------------
# components, coordinate shifts, reverted bases


def component(machine: Machine, word: AdmissibleWord, i: int) -> AdmissibleWord:
    """The i-th coordinate block of a configuration (1-based)."""
    coords = machine.meta.get("coords")
    if coords is None:
        raise MachineError(f"machine {machine.name} has no coordinates")
    ppc = coords["parts_per_copy"]
    if word.base() != word.hw.standard_base():
        raise MachineError("components are defined for standard-base configurations")
    if not 1 <= i <= coords["copies"]:
        raise MachineError(f"no component {i}")
    lo = ppc * (i - 1)
    return word.subword(lo, lo + ppc)


def coordinate_shift(machine: Machine, word: AdmissibleWord, j: int) -> AdmissibleWord:
    """The same admissible word re-homed at coordinate j."""
    coords = machine.meta.get("coords")
    if coords is None:
        raise MachineError(f"machine {machine.name} has no coordinates")
    qmap, amap = coords["q"], coords["a"]
    cs = {qmap[sym][0] for sym, _ in word.qs}
    for t in word.tapes:
        cs.update(amap[x][0] for x, _ in t)
    if len(cs) != 1:
        raise MixedCoordinates(f"letters carry coordinates {sorted(cs)}")
    q_by = {(key, c): sym for sym, (c, key) in qmap.items()}
    a_by = {(key, c): sym for sym, (c, key) in amap.items()}
    qs = tuple((q_by[(qmap[sym][1], j)], s) for sym, s in word.qs)
    tapes = tuple(
        tuple((a_by[(amap[x][1], j)], s) for x, s in t) for t in word.tapes
    )
    return AdmissibleWord(word.hw, qs, tapes)


BaseWord = tuple[tuple[str, int], ...]


def reverted_base(machine: Machine, base: BaseWord) -> BaseWord:
    """Forget coordinates: each part name maps to its single-copy original."""
    coords = machine.meta.get("coords")
    if coords is None:
        raise MachineError(f"machine {machine.name} has no coordinates")
    pmap = coords["part"]
    return tuple((pmap[name][1], s) for name, s in base)


def _is_revolving(base: BaseWord) -> bool:
    if len(base) < 2 or base[0] != base[-1]:
        return False
    return len(set(base[:-1])) == len(base) - 1 and len(set(base[1:])) == len(base) - 1


def _is_unreduced(base: BaseWord) -> bool:
    return any(a[0] == b[0] and a[1] == -b[1] for a, b in zip(base, base[1:]))


def base_flags(machine: Machine, base: BaseWord) -> dict[str, bool]:
    """Shape predicates of a base word: revolving / faulty / pararevolving /
    hyperfaulty / tight."""
    revolving = _is_revolving(base)
    faulty = revolving and _is_unreduced(base)
    if machine.meta.get("coords") is not None:
        rev = reverted_base(machine, base)
    else:
        rev = base
    pararevolving = _is_revolving(rev)
    hyperfaulty = pararevolving and _is_unreduced(rev)
    tight = False
    for idx in range(len(base) - 1):
        if base[idx] == base[-1]:
            tail = base[idx:]
            head = base[:idx]
            if _is_revolving(tail) and not (set(head) & set(tail)):
                tight = True
                break
    return {
        "revolving": revolving,
        "faulty": faulty,
        "pararevolving": pararevolving,
        "hyperfaulty": hyperfaulty,
        "tight": tight,
    }
