"""Machine combinators: primitive machines, concatenation, parallel copies, cyclization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    EMPTY,
    Hardware,
    Machine,
    MachineError,
    Part,
    Rule,
    RulePart,
)


class EmptyAlphabet(MachineError):
    pass


class ShapeMismatch(MachineError):
    pass


class AlreadyCyclic(MachineError):
    pass


@dataclass(frozen=True)
class TransitionSpec:
    """A transition rule between two consecutive submachines.

    ``locks=None`` derives the lock set: a sector is locked iff it is
    locked by every rule of the left submachine or by every rule of the
    right one.  Explicit lock sets override that computation.  A spec with
    ``kind="work"`` yields a connecting rule that lives inside its step
    (it carries a work tag and is not a step-history letter of its own).
    """

    rid: str
    frm: str
    to: str
    locks: frozenset[int] | None = None
    tag: str = ""
    tag_inv: str = ""
    family: str = "theta"
    kind: str = "transition"


def _primitive_hardware(alphabet: Sequence[str], running: str, style: str) -> Hardware:
    q1 = Part(f"Q^(1){style}", (f"q^(1){style}",), f"q^(1){style}", f"q^(1){style}")
    run = Part(
        running.upper() + style,
        (f"{running}^(1){style}", f"{running}^(2){style}"),
        f"{running}^(1){style}",
        f"{running}^(2){style}",
    )
    q2 = Part(f"Q^(2){style}", (f"q^(2){style}",), f"q^(2){style}", f"q^(2){style}")
    y1 = [f"{a}^(1){style}" for a in alphabet]
    y2 = [f"{a}^(2){style}" for a in alphabet]
    return Hardware((q1, run, q2), (y1, y2))


def lr(alphabet: Sequence[str], *, name: str = "lr", style: str = "") -> Machine:
    """Left-right primitive machine on a 3-part base Q(1) P Q(2).

    The running letter walks to the left neighbour (rules zeta1), switches
    there under the connecting rule (which locks the first sector), then
    walks back (zeta2).  Standard runs keep the first sector's word fixed
    overall and take exactly 2*len(word)+1 steps.
    """
    alphabet = tuple(alphabet)
    if not alphabet:
        raise EmptyAlphabet("lr needs a nonempty alphabet")
    hw = _primitive_hardware(alphabet, "p", style)
    q1, p1, p2, q2 = (
        f"q^(1){style}",
        f"p^(1){style}",
        f"p^(2){style}",
        f"q^(2){style}",
    )
    rules: list[Rule] = []
    tag = "(p)"
    for a in alphabet:
        a1, a2 = f"{a}^(1){style}", f"{a}^(2){style}"
        rules.append(
            Rule(
                rid=f"zeta1({a})",
                sign=1,
                parts=(
                    RulePart(q1, q1),
                    RulePart(p1, p1, left=((a1, -1),), right=((a2, 1),)),
                    RulePart(q2, q2),
                ),
                tag=tag,
                family="zeta",
            )
        )
    rules.append(
        Rule(
            rid="zeta12",
            sign=1,
            parts=(RulePart(q1, q1), RulePart(p1, p2), RulePart(q2, q2)),
            locks=frozenset({1}),
            tag=tag,
            family="zeta-conn",
        )
    )
    for a in alphabet:
        a1, a2 = f"{a}^(1){style}", f"{a}^(2){style}"
        rules.append(
            Rule(
                rid=f"zeta2({a})",
                sign=1,
                parts=(
                    RulePart(q1, q1),
                    RulePart(p2, p2, left=((a1, 1),), right=((a2, -1),)),
                    RulePart(q2, q2),
                ),
                tag=tag,
                family="zeta",
            )
        )
    proj = {f"{a}^({i}){style}": a for a in alphabet for i in (1, 2)}
    m = Machine(name, hw, rules, input_sectors=(), a_projection=proj)
    m.meta["sector_copy"] = {
        1: {a: f"{a}^(1){style}" for a in alphabet},
        2: {a: f"{a}^(2){style}" for a in alphabet},
    }
    return m


def rl(alphabet: Sequence[str], *, name: str = "rl", style: str = "") -> Machine:
    """Right-left primitive machine; the mirror of ``lr`` with running part R.

    Here the running letter ferries the second sector's word into the
    first (rules xi1), the connecting rule locks the second sector, and
    the xi2 rules ferry it back.
    """
    alphabet = tuple(alphabet)
    if not alphabet:
        raise EmptyAlphabet("rl needs a nonempty alphabet")
    hw = _primitive_hardware(alphabet, "r", style)
    q1, r1, r2, q2 = (
        f"q^(1){style}",
        f"r^(1){style}",
        f"r^(2){style}",
        f"q^(2){style}",
    )
    rules: list[Rule] = []
    tag = "(r)"
    for a in alphabet:
        a1, a2 = f"{a}^(1){style}", f"{a}^(2){style}"
        rules.append(
            Rule(
                rid=f"xi1({a})",
                sign=1,
                parts=(
                    RulePart(q1, q1),
                    RulePart(r1, r1, left=((a1, 1),), right=((a2, -1),)),
                    RulePart(q2, q2),
                ),
                tag=tag,
                family="xi",
            )
        )
    rules.append(
        Rule(
            rid="xi12",
            sign=1,
            parts=(RulePart(q1, q1), RulePart(r1, r2), RulePart(q2, q2)),
            locks=frozenset({2}),
            tag=tag,
            family="xi-conn",
        )
    )
    for a in alphabet:
        a1, a2 = f"{a}^(1){style}", f"{a}^(2){style}"
        rules.append(
            Rule(
                rid=f"xi2({a})",
                sign=1,
                parts=(
                    RulePart(q1, q1),
                    RulePart(r2, r2, left=((a1, -1),), right=((a2, 1),)),
                    RulePart(q2, q2),
                ),
                tag=tag,
                family="xi",
            )
        )
    proj = {f"{a}^({i}){style}": a for a in alphabet for i in (1, 2)}
    m = Machine(name, hw, rules, input_sectors=(), a_projection=proj)
    m.meta["sector_copy"] = {
        1: {a: f"{a}^(1){style}" for a in alphabet},
        2: {a: f"{a}^(2){style}" for a in alphabet},
    }
    return m


def common_locks(machine: Machine) -> frozenset[int]:
    """Sectors locked by every positive rule of the machine."""
    rules = machine.positive_rules
    if not rules:
        return frozenset(range(1, machine.hardware.nsectors + 1))
    out = rules[0].locks
    for r in rules[1:]:
        out &= r.locks
    return out


def _check_same_shape(subs: Sequence[Machine]) -> None:
    h0 = subs[0].hardware
    for m in subs[1:]:
        h = m.hardware
        if h.cyclic != h0.cyclic or h.nparts != h0.nparts:
            raise ShapeMismatch(f"{m.name}: part structure differs from {subs[0].name}")
        if h.sector_alphabets != h0.sector_alphabets:
            raise ShapeMismatch(f"{m.name}: sector alphabets differ from {subs[0].name}")
        if [p.name for p in h.parts] != [p.name for p in h0.parts]:
            raise ShapeMismatch(f"{m.name}: part names differ from {subs[0].name}")


def concatenate(
    submachines: Sequence[Machine],
    transitions: Sequence[TransitionSpec],
    *,
    name: str,
    input_sectors: Iterable[int] = (),
) -> Machine:
    """Chain submachines over one hardware shape with transition rules.

    The i-th transition rewrites the end letters of submachine i to the
    start letters of submachine i+1.  State-letter sets must be disjoint;
    part names and sector alphabets must agree.
    """
    if not submachines:
        raise ShapeMismatch("need at least one submachine")
    if len(transitions) != len(submachines) - 1:
        raise ShapeMismatch(
            f"{len(submachines)} submachines need {len(submachines) - 1} transitions"
        )
    _check_same_shape(submachines)
    h0 = submachines[0].hardware
    parts = []
    for i, p0 in enumerate(h0.parts):
        letters: list[str] = []
        for m in submachines:
            letters.extend(m.hardware.parts[i].letters)
        if len(set(letters)) != len(letters):
            raise ShapeMismatch(f"part {p0.name}: state letters not disjoint")
        parts.append(
            Part(
                p0.name,
                tuple(letters),
                start=submachines[0].hardware.parts[i].start,
                end=submachines[-1].hardware.parts[i].end,
            )
        )
    hw = Hardware(parts, h0.sector_alphabets, cyclic=h0.cyclic)
    rules: list[Rule] = []
    for m in submachines:
        rules.extend(m.positive_rules)
    by_name = {m.name: m for m in submachines}
    for i, spec in enumerate(transitions):
        left, right = submachines[i], submachines[i + 1]
        if spec.frm != left.name or spec.to != right.name:
            raise ShapeMismatch(
                f"transition {spec.rid} connects {spec.frm}->{spec.to},"
                f" expected {left.name}->{right.name}"
            )
        locks = spec.locks
        if locks is None:
            locks = common_locks(left) | common_locks(right)
        tparts = []
        for j in range(hw.nparts):
            frm = left.hardware.parts[j].end
            to = right.hardware.parts[j].start
            if frm is None or to is None:
                raise ShapeMismatch(
                    f"transition {spec.rid}: part {hw.parts[j].name} lacks start/end letters"
                )
            tparts.append(RulePart(frm, to))
        tag = spec.tag or f"({spec.frm},{spec.to})"
        if spec.kind == "transition":
            tag_inv = spec.tag_inv or f"({spec.to},{spec.frm})"
            edge = (_work_tag(left), _work_tag(right))
        else:
            tag_inv = ""
            edge = None
        rules.append(
            Rule(
                rid=spec.rid,
                sign=1,
                parts=tuple(tparts),
                locks=frozenset(locks),
                tag=tag,
                tag_inv=tag_inv,
                kind=spec.kind,
                family=spec.family,
                step_edge=edge,
            )
        )
    proj: dict[str, str] = {}
    for m in submachines:
        if m.a_projection:
            proj.update(m.a_projection)
    out = Machine(
        name,
        hw,
        rules,
        input_sectors=input_sectors,
        a_projection=proj or None,
    )
    copies = {}
    for m in submachines:
        for sid, table in m.meta.get("sector_copy", {}).items():
            copies.setdefault(sid, table)
    if copies:
        out.meta["sector_copy"] = copies
    out.meta["submachines"] = tuple(by_name)
    return out


def _work_tag(machine: Machine) -> str:
    for r in machine.positive_rules:
        if r.kind == "work":
            return r.tag
    return ""


def parallel(
    machine: Machine,
    copies: int,
    per_copy_locks: Iterable[tuple[int, int]] = (),
    *,
    name: str,
) -> Machine:
    """Coordinate-tagged copies of a cyclic machine driven by shared rules.

    Every rule acts identically on each copy.  ``per_copy_locks`` lists
    (coordinate, sector-of-original) pairs: those sector images are locked
    by every rule and any insertions into them are dropped, so the rule
    still acts in parallel on all other sectors.
    """
    if copies < 1:
        raise MachineError("need at least one copy")
    hw0 = machine.hardware
    if not hw0.cyclic:
        raise MachineError("parallel composition expects a cyclic machine")
    np0 = hw0.nparts
    ns0 = hw0.nsectors  # == np0 for cyclic hardware

    def qtag(sym: str, c: int) -> str:
        return f"{sym}@{c}"

    def atag(sym: str, c: int) -> str:
        return f"{sym}@{c}"

    parts = []
    part_coord: dict[str, tuple[int, str]] = {}
    q_coord: dict[str, tuple[int, str]] = {}
    a_coord: dict[str, tuple[int, str]] = {}
    for c in range(1, copies + 1):
        for p in hw0.parts:
            pname = f"{p.name}@{c}"
            parts.append(
                Part(
                    pname,
                    tuple(qtag(x, c) for x in p.letters),
                    start=qtag(p.start, c) if p.start else None,
                    end=qtag(p.end, c) if p.end else None,
                )
            )
            part_coord[pname] = (c, p.name)
            for x in p.letters:
                q_coord[qtag(x, c)] = (c, x)
    alphabets = []
    for c in range(1, copies + 1):
        for sid in range(1, ns0 + 1):
            alphabets.append([atag(x, c) for x in hw0.alphabet(sid)])
            for x in hw0.alphabet(sid):
                a_coord[atag(x, c)] = (c, x)
    hw = Hardware(parts, alphabets, cyclic=True)

    def shift(c: int, sid: int) -> int:
        return np0 * (c - 1) + sid

    stripped = frozenset((c, s) for c, s in per_copy_locks)
    rules = []
    for r in machine.positive_rules:
        rparts: list[RulePart] = []
        for c in range(1, copies + 1):
            for i, p in enumerate(r.parts):
                left, right = p.left, p.right
                if (c, hw0.sector_left_of(i)) in stripped:
                    left = EMPTY
                if (c, hw0.sector_right_of(i)) in stripped:
                    right = EMPTY
                rparts.append(
                    RulePart(
                        qtag(p.frm, c),
                        qtag(p.to, c),
                        tuple((atag(x, c), s) for x, s in left),
                        tuple((atag(x, c), s) for x, s in right),
                    )
                )
        locks = {shift(c, sid) for c in range(1, copies + 1) for sid in r.locks}
        locks |= {shift(c, sid) for c, sid in stripped}
        overrides = tuple(
            (shift(c, sid), frozenset(atag(x, c) for x in dom))
            for c in range(1, copies + 1)
            for sid, dom in r.domain_overrides
            if (c, sid) not in stripped
        )
        rules.append(
            Rule(
                rid=r.rid,
                sign=1,
                parts=tuple(rparts),
                locks=frozenset(locks),
                domain_overrides=overrides,
                tag=r.tag,
                tag_inv=r.tag_inv,
                kind=r.kind,
                family=r.family,
                step_edge=r.step_edge,
            )
        )
    proj = None
    if machine.a_projection:
        proj = {
            atag(sym, c): target
            for sym, target in machine.a_projection.items()
            for c in range(1, copies + 1)
        }
    inputs = {
        shift(c, sid) for c in range(1, copies + 1) for sid in machine.input_sectors
    }
    out = Machine(name, hw, rules, input_sectors=inputs, a_projection=proj)
    base_copies = machine.meta.get("sector_copy", {})
    copies_map = {}
    for c in range(1, copies + 1):
        for sid, table in base_copies.items():
            copies_map[shift(c, sid)] = {a: atag(sym, c) for a, sym in table.items()}
    if copies_map:
        out.meta["sector_copy"] = copies_map
    out.meta["coords"] = {
        "copies": copies,
        "parts_per_copy": np0,
        "part": part_coord,
        "q": q_coord,
        "a": a_coord,
    }
    return out


def cyclize(machine: Machine, new_part_name: str, *, name: str) -> Machine:
    """Wrap a linear machine into a cyclic one with a one-letter part in front.

    Both new sectors (before the old first part and the wrap-around after
    the old last part) carry empty tape alphabets and are locked by every
    rule; every rule fixes the new state letter.
    """
    hw0 = machine.hardware
    if hw0.cyclic:
        raise AlreadyCyclic(f"machine {machine.name} is already cyclic")
    marker = new_part_name.lower()
    parts = (Part(new_part_name, (marker,), marker, marker),) + hw0.parts
    alphabets: list[Iterable[str]] = [()]
    alphabets.extend(hw0.sector_alphabets)
    alphabets.append(())
    hw = Hardware(parts, alphabets, cyclic=True)
    nsec = hw.nsectors
    rules = []
    for r in machine.positive_rules:
        rules.append(
            Rule(
                rid=r.rid,
                sign=1,
                parts=(RulePart(marker, marker),) + r.parts,
                locks=frozenset({s + 1 for s in r.locks} | {1, nsec}),
                domain_overrides=tuple((s + 1, d) for s, d in r.domain_overrides),
                tag=r.tag,
                tag_inv=r.tag_inv,
                kind=r.kind,
                family=r.family,
                step_edge=r.step_edge,
            )
        )
    out = Machine(
        name,
        hw,
        rules,
        input_sectors={s + 1 for s in machine.input_sectors},
        a_projection=dict(machine.a_projection) if machine.a_projection else None,
    )
    if "sector_copy" in machine.meta:
        out.meta["sector_copy"] = {
            s + 1: dict(t) for s, t in machine.meta["sector_copy"].items()
        }
    out.meta["cyclized_from"] = machine.name
    return out
