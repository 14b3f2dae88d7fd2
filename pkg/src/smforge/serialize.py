"""Line-oriented text formats: machine definitions and computation traces.

Both formats are deterministic (stable key order) and round-trip exactly.
A machine file is either a full definition or a one-line ``tower`` form
that names a builder and its parameters, so the whole tower can be rebuilt
from a declarative file.
"""

from __future__ import annotations

from typing import Sequence

from .core import (
    Computation,
    Hardware,
    Machine,
    MachineError,
    Part,
    Rule,
    RulePart,
    fmt_admissible,
    fmt_elem,
    parse_admissible,
    parse_elem,
    run,
)
from .words import Word, fmt_word, parse_word

FORMAT_HEADER = "smforge-machine 1"

_META_KEYS = ("builder", "n", "k", "L", "m2_ofs", "parts_per_copy", "special_sector", "read_copy")


def _fmt_w(w: Word) -> str:
    return fmt_word(w) if w else "-"


def _parse_w(text: str) -> Word:
    return () if text == "-" else parse_word(text)


def machine_to_text(machine: Machine) -> str:
    hw = machine.hardware
    lines = [FORMAT_HEADER, f"name {machine.name}", f"cyclic {int(hw.cyclic)}"]
    for p in hw.parts:
        lines.append(
            f"part {p.name} start={p.start or '-'} end={p.end or '-'} "
            f"letters={','.join(p.letters)}"
        )
    for sid in range(1, hw.nsectors + 1):
        letters = ",".join(sorted(hw.alphabet(sid))) or "-"
        lines.append(f"sector {sid} letters={letters}")
    lines.append(
        "input-sectors " + (",".join(map(str, sorted(machine.input_sectors))) or "-")
    )
    for r in machine.positive_rules:
        lines.append(
            f"rule {r.rid} tag={r.tag or '-'} tag_inv={r.tag_inv or '-'} "
            f"kind={r.kind} family={r.family or '-'}"
        )
        for i, rp in enumerate(r.parts):
            lines.append(
                f"  rpart {i} from={rp.frm} to={rp.to} "
                f"left={_fmt_w(rp.left).replace(' ', '.')} "
                f"right={_fmt_w(rp.right).replace(' ', '.')}"
            )
        lines.append("  locks " + (",".join(map(str, sorted(r.locks))) or "-"))
        for sid, dom in sorted(r.domain_overrides):
            lines.append(f"  domain {sid} {','.join(sorted(dom)) or '-'}")
        if r.step_edge:
            lines.append(f"  edge {r.step_edge[0]} {r.step_edge[1]}")
    if machine.a_projection:
        for sym in sorted(machine.a_projection):
            lines.append(f"project {sym} {machine.a_projection[sym]}")
    copies = machine.meta.get("sector_copy", {})
    for sid in sorted(copies):
        for a in sorted(copies[sid]):
            lines.append(f"copy {sid} {a} {copies[sid][a]}")
    for key in _META_KEYS:
        if key in machine.meta:
            val = machine.meta[key]
            if isinstance(val, int):
                lines.append(f"meta {key} {val}")
            elif isinstance(val, str):
                lines.append(f"meta {key} {val}")
    if "alphabet" in machine.meta:
        lines.append("meta alphabet " + ",".join(machine.meta["alphabet"]))
    return "\n".join(lines) + "\n"


def machine_from_text(text: str) -> Machine:
    lines = [l.rstrip("\n") for l in text.splitlines() if l.strip()]
    if lines and lines[0].startswith("tower "):
        return _machine_from_tower_line(lines[0])
    if not lines or lines[0] != FORMAT_HEADER:
        raise MachineError(f"expected header {FORMAT_HEADER!r}")
    name = "machine"
    cyclic = False
    parts: list[Part] = []
    sectors: dict[int, list[str]] = {}
    inputs: set[int] = set()
    rules: list[Rule] = []
    projection: dict[str, str] = {}
    copies: dict[int, dict[str, str]] = {}
    meta: dict = {}
    cur: dict | None = None

    def flush() -> None:
        nonlocal cur
        if cur is None:
            return
        rules.append(
            Rule(
                rid=cur["rid"],
                sign=1,
                parts=tuple(cur["parts"]),
                locks=frozenset(cur["locks"]),
                domain_overrides=tuple(cur["domains"]),
                tag=cur["tag"],
                tag_inv=cur["tag_inv"],
                kind=cur["kind"],
                family=cur["family"],
                step_edge=cur["edge"],
            )
        )
        cur = None

    for raw in lines[1:]:
        line = raw.strip()
        key, _, rest = line.partition(" ")
        if key == "name":
            name = rest
        elif key == "cyclic":
            cyclic = bool(int(rest))
        elif key == "part":
            fields = rest.split(" ")
            pname = fields[0]
            kw = dict(f.split("=", 1) for f in fields[1:])
            parts.append(
                Part(
                    pname,
                    tuple(kw["letters"].split(",")),
                    None if kw["start"] == "-" else kw["start"],
                    None if kw["end"] == "-" else kw["end"],
                )
            )
        elif key == "sector":
            sid, _, spec = rest.partition(" ")
            val = spec.split("=", 1)[1]
            sectors[int(sid)] = [] if val == "-" else val.split(",")
        elif key == "input-sectors":
            if rest != "-":
                inputs = {int(x) for x in rest.split(",")}
        elif key == "rule":
            flush()
            fields = rest.split(" ")
            kw = dict(f.split("=", 1) for f in fields[1:])
            cur = {
                "rid": fields[0],
                "tag": "" if kw["tag"] == "-" else kw["tag"],
                "tag_inv": "" if kw["tag_inv"] == "-" else kw["tag_inv"],
                "kind": kw["kind"],
                "family": "" if kw["family"] == "-" else kw["family"],
                "parts": [],
                "locks": set(),
                "domains": [],
                "edge": None,
            }
        elif key == "rpart":
            assert cur is not None
            fields = rest.split(" ")
            kw = dict(f.split("=", 1) for f in fields[1:])
            cur["parts"].append(
                RulePart(
                    kw["from"],
                    kw["to"],
                    _parse_w(kw["left"].replace(".", " ")),
                    _parse_w(kw["right"].replace(".", " ")),
                )
            )
        elif key == "locks":
            assert cur is not None
            if rest != "-":
                cur["locks"] = {int(x) for x in rest.split(",")}
        elif key == "domain":
            assert cur is not None
            sid, _, dom = rest.partition(" ")
            cur["domains"].append(
                (int(sid), frozenset() if dom == "-" else frozenset(dom.split(",")))
            )
        elif key == "edge":
            assert cur is not None
            a, _, b = rest.partition(" ")
            cur["edge"] = (a, b)
        elif key == "project":
            sym, _, target = rest.partition(" ")
            projection[sym] = target
        elif key == "copy":
            sid, a, sym = rest.split(" ")
            copies.setdefault(int(sid), {})[a] = sym
        elif key == "meta":
            mkey, _, val = rest.partition(" ")
            if mkey == "alphabet":
                meta[mkey] = tuple(val.split(","))
            elif val.isdigit():
                meta[mkey] = int(val)
            else:
                meta[mkey] = val
        else:
            raise MachineError(f"unknown line in machine file: {raw!r}")
    flush()
    hw = Hardware(parts, [sectors[s] for s in sorted(sectors)], cyclic=cyclic)
    m = Machine(name, hw, rules, inputs, projection or None)
    if copies:
        m.meta["sector_copy"] = copies
    m.meta.update(meta)
    return m


def tower_line(builder: str, alphabet: Sequence[str], n: int, k: int, L: int) -> str:
    return f"tower {builder} alphabet={','.join(alphabet)} n={n} k={k} L={L}\n"


def _machine_from_tower_line(line: str) -> Machine:
    from .tower import TowerParams, build

    fields = line.split()
    if len(fields) < 2:
        raise MachineError(f"bad tower line: {line!r}")
    kw = dict(f.split("=", 1) for f in fields[2:])
    params = TowerParams(
        alphabet=tuple(kw["alphabet"].split(",")),
        n=int(kw.get("n", 2)),
        k=int(kw.get("k", 3)),
        L=int(kw.get("L", 3)),
    )
    return build(fields[1], params)


def trace_to_text(comp: Computation) -> str:
    lines = [f"0\t-\t{fmt_admissible(comp.words[0])}"]
    for i, elem in enumerate(comp.history, start=1):
        lines.append(f"{i}\t{fmt_elem(elem)}\t{fmt_admissible(comp.words[i])}")
    return "\n".join(lines) + "\n"


def trace_from_text(machine: Machine, text: str) -> Computation:
    """Parse and re-validate a trace; every step is re-run through the engine."""
    rows: list[tuple[int, str, str]] = []
    for raw in text.splitlines():
        if not raw.strip():
            continue
        idx, elem, word = raw.split("\t")
        rows.append((int(idx), elem, word))
    if not rows or rows[0][0] != 0:
        raise MachineError("trace must start at step 0")
    start = parse_admissible(machine.hardware, rows[0][2])
    history = tuple(parse_elem(e) for _, e, _ in rows[1:])
    comp = run(machine, start, history)
    for (idx, _, word), got in zip(rows, comp.words):
        if fmt_admissible(got) != word:
            raise MachineError(f"trace row {idx} does not replay")
    return comp
