"""Constructive band complexes: one-rule bands, trapezia, disk and power
diagrams, plus the metrics (modified length, weight, area, mixture).

Diagrams here are not general planar maps.  Everything is a stack of
rule bands glued top-to-bottom, with an optional hub pasted after rolling
the stack up, so the structural band facts (each state-letter column and
each surviving tape-letter thread crosses a band exactly once, no closed
bands) are verifiable by direct counting on the data structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .core import (
    AdmissibleWord,
    Computation,
    Machine,
    MachineError,
    Rule,
    RuleElem,
    apply_rule,
    fmt_elem,
    is_theta_admissible,
    run,
)
from .presentations import GenLetter, GenWord, fmt_gen_letter, _inv_gen
from .tower import canonical_accepting_m, config_i, config_j
from .words import Word, power


class EmptyHistory(MachineError):
    pass


class WitnessInvalid(MachineError):
    pass


class EmptyWord(MachineError):
    pass


@dataclass(frozen=True)
class MetricParams:
    """Exact metric constants: tape letters cost ``delta``, hubs and disks
    weigh ``c1`` times squared boundary length, mixtures look ``j_depth``
    beads deep."""

    delta: Fraction = Fraction(1, 100)
    c1: Fraction = Fraction(100)
    j_depth: int = 2

    def __post_init__(self) -> None:
        if not 0 < self.delta < 1:
            raise ValueError("delta must lie strictly between 0 and 1")
        if self.c1 <= 0 or self.j_depth <= 0:
            raise ValueError("c1 and j_depth must be positive")


@dataclass(frozen=True)
class Cell:
    kind: str  # "tq" | "ta" | "hub" | "disk" | "acell"
    boundary: GenWord


@dataclass(frozen=True)
class BandCell:
    """One cell of a rule band: bottom/top labels plus side rule edges."""

    kind: str  # "tq" | "ta"
    bottom: GenWord
    top: GenWord
    left: GenLetter
    right: GenLetter

    def boundary(self) -> GenWord:
        return (
            tuple(_inv_gen((self.left,)))
            + self.bottom
            + (self.right,)
            + _inv_gen(self.top)
        )

    def to_cell(self) -> Cell:
        return Cell(self.kind, self.boundary())


def _th(rule: Rule, idx: int) -> GenLetter:
    return ("th", (rule.rid, idx), rule.sign)


def theta_band(machine: Machine, word: AdmissibleWord, elem: RuleElem) -> "ThetaBand":
    """The one-rule band whose trimmed bottom reads ``word``.

    Cells appear left to right: a state cell per state letter, a tape cell
    per tape letter; consecutive cells share their rule edge.
    """
    rule = machine.rule(elem)
    if not is_theta_admissible(word, rule):
        raise MachineError(f"word is not admissible for {fmt_elem(elem)}")
    hw = word.hw
    nthetas = hw.nparts
    top_word = apply_rule(word, rule)
    cells: list[BandCell] = []
    last = len(word.qs) - 1
    for i, (sym, sign) in enumerate(word.qs):
        p = hw.part_of[sym]
        rp = rule.parts[p]
        li = hw.sector_left_of(p) % nthetas
        ri = hw.sector_right_of(p) % nthetas
        if sign == 1:
            left_idx, right_idx = li, ri
            top: GenWord = (
                tuple(("a", x, s) for x, s in rp.left)
                + (("q", rp.to, 1),)
                + tuple(("a", x, s) for x, s in rp.right)
            )
        else:
            left_idx, right_idx = ri, li
            top = (
                tuple(("a", x, -s) for x, s in reversed(rp.right))
                + (("q", rp.to, -1),)
                + tuple(("a", x, -s) for x, s in reversed(rp.left))
            )
        if i == 0:
            top = top[next(j for j, x in enumerate(top) if x[0] == "q"):]
        if i == last:
            top = top[: next(j for j, x in enumerate(top) if x[0] == "q") + 1]
        cells.append(
            BandCell(
                "tq",
                (("q", sym, sign),),
                top,
                _th(rule, left_idx),
                _th(rule, right_idx),
            )
        )
        if i < last:
            sid = word.sectors[i] % nthetas
            for x, s in word.tapes[i]:
                cells.append(
                    BandCell(
                        "ta",
                        (("a", x, s),),
                        (("a", x, s),),
                        _th(rule, sid),
                        _th(rule, sid),
                    )
                )
    band = ThetaBand(machine, elem, tuple(cells), word, top_word)
    band.check()
    return band


@dataclass
class ThetaBand:
    machine: Machine
    elem: RuleElem
    cells: tuple[BandCell, ...]
    tbot: AdmissibleWord
    ttop: AdmissibleWord

    @property
    def area(self) -> int:
        return len(self.cells)

    def untrimmed_top(self) -> GenWord:
        out: list[GenLetter] = []
        for c in self.cells:
            out.extend(c.top)
        return tuple(out)

    def untrimmed_bottom(self) -> GenWord:
        out: list[GenLetter] = []
        for c in self.cells:
            out.extend(c.bottom)
        return tuple(out)

    def side(self, which: str) -> GenLetter:
        return self.cells[0].left if which == "left" else self.cells[-1].right

    def check(self) -> None:
        """Interior rule edges glue pairwise; labels match the rewrite."""
        for a, b in zip(self.cells, self.cells[1:]):
            if a.right != b.left:
                raise MachineError("band cells do not share their rule edge")
        got = _reduce_gen(self.untrimmed_top())
        want = _config_gen(self.ttop)
        if _trim_a(got) != want:
            raise MachineError("band top does not read the rewritten word")


def _config_gen(word: AdmissibleWord) -> GenWord:
    out: list[GenLetter] = []
    for i, (sym, sign) in enumerate(word.qs):
        out.append(("q", sym, sign))
        if i < len(word.tapes):
            out.extend(("a", x, s) for x, s in word.tapes[i])
    return tuple(out)


def _reduce_gen(w: GenWord) -> GenWord:
    out: list[GenLetter] = []
    for x in w:
        if out and out[-1][0] == x[0] and out[-1][1] == x[1] and out[-1][2] == -x[2]:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _trim_a(w: GenWord) -> GenWord:
    lo, hi = 0, len(w)
    while lo < hi and w[lo][0] != "q":
        lo += 1
    while hi > lo and w[hi - 1][0] != "q":
        hi -= 1
    return w[lo:hi]


@dataclass
class Trapezium:
    """Stacked bands: band i's top is band i+1's bottom, sides read the history."""

    machine: Machine
    bands: tuple[ThetaBand, ...]

    @property
    def height(self) -> int:
        return len(self.bands)

    @property
    def history(self) -> tuple[RuleElem, ...]:
        return tuple(b.elem for b in self.bands)

    @property
    def area(self) -> int:
        return sum(b.area for b in self.bands)

    def cells(self) -> Iterator[Cell]:
        for b in self.bands:
            for c in b.cells:
                yield c.to_cell()

    def bottom(self) -> AdmissibleWord:
        return self.bands[0].tbot

    def top(self) -> AdmissibleWord:
        return self.bands[-1].ttop

    def side(self, which: str) -> GenWord:
        return tuple(b.side(which) for b in self.bands)

    def boundary(self) -> GenWord:
        """Counterclockwise: inverse left side, bottom, right side, inverse top."""
        left = self.side("left")
        right = self.side("right")
        return (
            _inv_gen(left)
            + _config_gen(self.bottom())
            + right
            + _inv_gen(_config_gen(self.top()))
        )

    def check_structure(self) -> None:
        """Band facts, verified by counting on the complex.

        Every state-letter column crosses each band exactly once; surviving
        tape-letter threads are strictly ascending (no thread meets a band
        twice, no closed threads); adjacent bands agree on their interface.
        """
        qlen = self.bands[0].tbot.q_len
        for b in self.bands:
            b.check()
            if sum(1 for c in b.cells if c.kind == "tq") != qlen:
                raise MachineError("a state-letter column misses a band")
            if b.tbot.base() != self.bands[0].tbot.base():
                raise MachineError("bands disagree on the base")
        for a, b in zip(self.bands, self.bands[1:]):
            if a.ttop != b.tbot:
                raise MachineError("adjacent bands do not share their interface")


def trapezium(comp: Computation) -> Trapezium:
    if comp.length < 1:
        raise EmptyHistory("a trapezium needs at least one rule")
    bands = []
    for i, elem in enumerate(comp.history):
        bands.append(theta_band(comp.machine, comp.words[i], elem))
    trap = Trapezium(comp.machine, tuple(bands))
    trap.check_structure()
    return trap


@dataclass
class DiskDiagram:
    """A rolled-up trapezium capped by one hub; boundary reads the configuration."""

    machine: Machine
    config: AdmissibleWord
    trapezium: Trapezium | None
    hub: Cell
    gluings: tuple[str, ...]

    @property
    def area(self) -> int:
        return (self.trapezium.area if self.trapezium else 0) + 1

    def cells(self) -> Iterator[Cell]:
        if self.trapezium is not None:
            yield from self.trapezium.cells()
        yield self.hub

    def boundary(self) -> GenWord:
        return _config_gen(self.config)


def disk_diagram(
    machine: Machine, config: AdmissibleWord, witness: Sequence[RuleElem]
) -> DiskDiagram:
    """Witness trapezium with its identical sides glued and a hub pasted in.

    Needs a cyclic machine whose every rule locks the wrap sector, which
    is what makes the two sides read the same history copy.
    """
    accept = machine.accept_config()
    hub = Cell("hub", _config_gen(accept))
    if not machine.hardware.cyclic:
        raise WitnessInvalid("disk diagrams need a cyclic machine")
    wrap = machine.hardware.nsectors
    for r in machine.positive_rules:
        if wrap not in r.locks:
            raise WitnessInvalid("every rule must lock the wrap sector")
    if not witness:
        if config != accept:
            raise WitnessInvalid("empty witness but not the accept configuration")
        return DiskDiagram(machine, config, None, hub, ("hub-only",))
    comp = run(machine, config, tuple(witness))
    if comp.final != accept:
        raise WitnessInvalid("witness does not reach the accept configuration")
    trap = trapezium(comp)
    left = trap.side("left")
    right = trap.side("right")
    if left != right:
        raise WitnessInvalid("trapezium sides differ; cannot glue")
    return DiskDiagram(
        machine, config, trap, hub, ("sides-glued", "hub-at-top")
    )


@dataclass
class PowerDiagram:
    """Two disk diagrams glued along everything but the special input
    sector; what remains of the boundary is the n-th power itself."""

    machine: Machine
    word: Word  # the root u
    disk_full: DiskDiagram
    disk_empty: DiskDiagram
    boundary_tape: Word  # special-sector copy of u**n

    @property
    def area(self) -> int:
        return self.disk_full.area + self.disk_empty.area

    def cells(self) -> Iterator[Cell]:
        yield from self.disk_full.cells()
        for c in self.disk_empty.cells():
            yield Cell(c.kind, _inv_gen(c.boundary))

    def boundary(self) -> GenWord:
        return tuple(("a", x, s) for x, s in self.boundary_tape)

    def boundary_projected(self) -> Word:
        proj = self.machine.a_projection
        return tuple((proj[x], s) for x, s in self.boundary_tape)


def un_diagram(machine: Machine, u: Word) -> PowerDiagram:
    """The diagram witnessing u**n = 1 against the hub quotient: the full
    and special-sector-empty runs glued along their common part."""
    if not u:
        raise EmptyWord("the power of the empty word needs no diagram")
    n = machine.meta["n"]
    special = machine.meta["special_sector"]
    w = power(u, n)
    full = config_i(machine, w)
    empty = config_j(machine, w)
    d1 = disk_diagram(machine, full, canonical_accepting_m(machine, u, 1))
    d2 = disk_diagram(machine, empty, canonical_accepting_m(machine, u, 2))
    return PowerDiagram(machine, u, d1, d2, full.tapes[special - 1])


# ---------------------------------------------------------------------------
# metrics


def letter_cost(x: GenLetter, params: MetricParams) -> Fraction:
    return params.delta if x[0] == "a" else Fraction(1)


def _is_syllable(a: GenLetter, b: GenLetter) -> bool:
    return {a[0], b[0]} == {"th", "a"}


def modified_length(w: GenWord, params: MetricParams) -> Fraction:
    """Cheapest factorization into letters and rule-tape syllables (cost 1)."""
    dp: list[Fraction] = [Fraction(0)]
    for i, x in enumerate(w):
        best = dp[i] + letter_cost(x, params)
        if i >= 1 and _is_syllable(w[i - 1], x):
            cand = dp[i - 1] + 1
            if cand < best:
                best = cand
        dp.append(best)
    return dp[-1]


def modified_length_bruteforce(w: GenWord, params: MetricParams) -> Fraction:
    """Reference: minimum over every factorization, enumerated outright."""
    if not w:
        return Fraction(0)
    best: Fraction | None = None
    for mask in range(1 << (len(w) - 1)):
        cost = Fraction(0)
        start = 0
        ok = True
        for i in range(len(w)):
            if i == len(w) - 1 or mask & (1 << i):
                factor = w[start : i + 1]
                if len(factor) == 1:
                    cost += letter_cost(factor[0], params)
                elif len(factor) == 2 and _is_syllable(factor[0], factor[1]):
                    cost += 1
                else:
                    ok = False
                    break
                start = i + 1
        if ok and (best is None or cost < best):
            best = cost
    assert best is not None
    return best


def cell_weight(cell: Cell, params: MetricParams) -> Fraction:
    if cell.kind in ("tq", "ta"):
        return Fraction(1)
    if cell.kind in ("hub", "disk"):
        return params.c1 * modified_length(cell.boundary, params) ** 2
    if cell.kind == "acell":
        return params.c1 * Fraction(len(cell.boundary)) ** 2
    raise MachineError(f"unknown cell kind {cell.kind}")


def weight(diagram, params: MetricParams) -> Fraction:
    return sum((cell_weight(c, params) for c in diagram.cells()), Fraction(0))


def area(diagram) -> int:
    return sum(1 for _ in diagram.cells())


def a_cell(word: Word) -> Cell:
    """A relator cell over the input alphabet (weighed by squared length)."""
    return Cell("acell", tuple(("a", x, s) for x, s in word))


# ---------------------------------------------------------------------------
# necklaces and mixtures


@dataclass(frozen=True)
class Necklace:
    beads: tuple[str, ...]  # "w" | "b"

    def __post_init__(self) -> None:
        if any(b not in ("w", "b") for b in self.beads):
            raise ValueError("beads must be 'w' or 'b'")

    def rotate(self, i: int) -> "Necklace":
        if not self.beads:
            return self
        i %= len(self.beads)
        return Necklace(self.beads[i:] + self.beads[:i])

    def remove(self, i: int) -> "Necklace":
        return Necklace(self.beads[:i] + self.beads[i + 1 :])


def mixture(neck: Necklace, j_depth: int) -> int:
    """Sum over depths 1..J of the ordered white pairs separated by at
    least that many black beads, counted literally."""
    beads = neck.beads
    size = len(beads)
    whites = [i for i, b in enumerate(beads) if b == "w"]
    total = 0
    for j in range(1, j_depth + 1):
        for o1 in whites:
            for o2 in whites:
                if o1 == o2:
                    continue
                blacks = 0
                i = (o1 + 1) % size
                while i != o2:
                    if beads[i] == "b":
                        blacks += 1
                    i = (i + 1) % size
                if blacks >= j:
                    total += 1
    return total


def necklace_of_boundary(boundary: GenWord) -> Necklace:
    """Beads in boundary order from the canonical rotation: white per rule
    edge, black per state edge; tape edges carry no bead."""
    if not boundary:
        return Necklace(())
    keys = [(x[0], repr(x[1]), x[2]) for x in boundary]
    best = min(range(len(boundary)), key=lambda i: keys[i:] + keys[:i])
    rotated = boundary[best:] + boundary[:best]
    beads = []
    for x in rotated:
        if x[0] == "th":
            beads.append("w")
        elif x[0] == "q":
            beads.append("b")
    return Necklace(tuple(beads))


# ---------------------------------------------------------------------------
# exports


def _cells_list(diagram) -> list[Cell]:
    return list(diagram.cells())


def export_flat(diagram) -> str:
    """One line per cell: id, kind, boundary; then the gluing records."""
    lines = []
    for i, c in enumerate(_cells_list(diagram)):
        lines.append(
            f"cell {i} {c.kind} " + " ".join(fmt_gen_letter(x) for x in c.boundary)
        )
    for g in _gluing_records(diagram):
        lines.append("glue " + g)
    return "\n".join(lines) + "\n"


def _gluing_records(diagram) -> list[str]:
    out = []
    if isinstance(diagram, Trapezium):
        for i in range(len(diagram.bands) - 1):
            out.append(f"band {i} top = band {i + 1} bottom")
    elif isinstance(diagram, DiskDiagram):
        if diagram.trapezium is not None:
            out.extend(_gluing_records(diagram.trapezium))
            out.append("left side = right side")
            out.append("hub boundary = top of last band")
    elif isinstance(diagram, PowerDiagram):
        out.append("full disk boundary = empty disk boundary off the special sector")
    return out


_KIND_COLORS = {"tq": "lightblue", "ta": "lightyellow", "hub": "red", "disk": "orange", "acell": "green"}


def export_dot(diagram, name: str = "diagram") -> str:
    """Cells as nodes (colored by kind), shared rule edges as graph edges."""
    cells = _cells_list(diagram)
    lines = [f"graph {name} {{", "  node [style=filled];"]
    for i, c in enumerate(cells):
        color = _KIND_COLORS.get(c.kind, "white")
        lines.append(f'  c{i} [label="{c.kind}" fillcolor="{color}"];')
    if isinstance(diagram, Trapezium):
        bands = diagram.bands
    elif isinstance(diagram, DiskDiagram) and diagram.trapezium is not None:
        bands = diagram.trapezium.bands
    else:
        bands = ()
    offset = 0
    for b in bands:
        for i in range(len(b.cells) - 1):
            lines.append(f"  c{offset + i} -- c{offset + i + 1};")
        offset += len(b.cells)
    lines.append("}")
    return "\n".join(lines) + "\n"
