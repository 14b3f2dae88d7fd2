"""Group presentations read off a machine, and the relator oracles.

Generators are the state letters, the tape letters, and one indexed
letter per positive rule per part boundary (index arithmetic wraps, so
index s+1 is index 0).  Relators come in five kinds:

* ``tq``   -- one per positive rule per part,
* ``ta``   -- one per positive rule per domain letter,
* ``hub``  -- the accept configuration,
* ``disk`` -- any accepted configuration (caller certifies acceptance),
* ``arel`` -- words over the designated input alphabet, streamed lazily.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .core import AdmissibleWord, Machine, MachineError, run
from .words import Word, inv, mul, power

# generator letter: (kind, payload, sign); theta payload is (rule id, index)
GenLetter = tuple[str, object, int]
GenWord = tuple[GenLetter, ...]


class NotAccepted(MachineError):
    pass


@dataclass(frozen=True)
class Relator:
    tag: str
    word: GenWord

    def canonical(self) -> GenWord:
        """Least rotation among the word and its inverse (dedup key)."""
        cands = []
        for w in (self.word, _inv_gen(self.word)):
            for i in range(max(1, len(w))):
                cands.append(w[i:] + w[:i])
        return min(cands, key=_gen_sort_key)


def _inv_gen(w: GenWord) -> GenWord:
    return tuple((k, p, -s) for k, p, s in reversed(w))


def _gen_sort_key(w: GenWord):
    return tuple((k, repr(p), s) for k, p, s in w)


@dataclass
class Presentation:
    name: str
    q_letters: tuple[str, ...]
    a_letters: tuple[str, ...]
    theta_letters: tuple[str, ...]
    relators: list[Relator]
    streamed: Iterator[Relator] | None = None

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.relators:
            out[r.tag] = out.get(r.tag, 0) + 1
        return out


def theta_name(rid: str, index: int) -> str:
    return f"theta:{rid}:{index}"


def _config_word(word: AdmissibleWord) -> GenWord:
    out: list[GenLetter] = []
    for i, (sym, sign) in enumerate(word.qs):
        out.append(("q", sym, sign))
        if i < len(word.tapes):
            out.extend(("a", x, s) for x, s in word.tapes[i])
    return tuple(out)


def _theta_count(machine: Machine) -> int:
    return machine.hardware.nparts  # indices 0..s with s+1 parts -> s+1 letters


def presentation_m(machine: Machine) -> Presentation:
    """The rewriting group: tq-relations walk each rule across one part,
    ta-relations commute each rule letter with its domain."""
    hw = machine.hardware
    issues = machine.validate()
    if issues:
        raise MachineError("machine is not normalized: " + "; ".join(issues))
    nthetas = _theta_count(machine)
    q_letters = tuple(x for p in hw.parts for x in p.letters)
    a_letters = tuple(
        x for sid in range(1, hw.nsectors + 1) for x in sorted(hw.alphabet(sid))
    )
    theta_letters = tuple(
        theta_name(r.rid, i) for r in machine.positive_rules for i in range(nthetas)
    )
    relators: list[Relator] = []
    seen: set = set()

    def push(rel: Relator) -> None:
        key = rel.canonical()
        if key in seen:
            raise MachineError(f"duplicate relator emitted: {rel}")
        seen.add(key)
        relators.append(rel)

    for r in machine.positive_rules:
        for i, rp in enumerate(r.parts):
            left_idx = i
            right_idx = (i + 1) % nthetas
            word: list[GenLetter] = [("q", rp.frm, 1), ("th", (r.rid, right_idx), 1)]
            word.extend(("a", x, -s) for x, s in reversed(rp.right))
            word.append(("q", rp.to, -1))
            word.extend(("a", x, -s) for x, s in reversed(rp.left))
            word.append(("th", (r.rid, left_idx), -1))
            push(Relator("tq", tuple(word)))
        for sid in range(1, hw.nsectors + 1):
            idx = sid % nthetas
            for a in sorted(r.domain(hw, sid)):
                push(
                    Relator(
                        "ta",
                        (
                            ("th", (r.rid, idx), 1),
                            ("a", a, 1),
                            ("th", (r.rid, idx), -1),
                            ("a", a, -1),
                        ),
                    )
                )
    return Presentation(machine.name, q_letters, a_letters, theta_letters, relators)


def presentation_g(machine: Machine) -> Presentation:
    """presentation_m plus the hub relator (the accept configuration)."""
    pres = presentation_m(machine)
    pres.relators.append(Relator("hub", _config_word(machine.accept_config())))
    return pres


def presentation_omega(
    machine: Machine,
    source: Iterable[Word],
    sector: int | None = None,
) -> Presentation:
    """presentation_g with a lazy stream of input-alphabet relators.

    ``source`` yields words over the machine's input alphabet; each is
    copied into the designated sector's tape alphabet.  The stream is
    attached unconsumed since it may be infinite.
    """
    pres = presentation_g(machine)
    if sector is None:
        sector = machine.meta.get("special_sector")
    if sector is None:
        raise MachineError("no sector designated for the extra relators")
    table = machine.meta["sector_copy"][sector]

    def stream() -> Iterator[Relator]:
        for w in source:
            yield Relator("arel", tuple(("a", table[x], s) for x, s in w))

    pres.streamed = stream()
    return pres


def disk_relator_stream(
    machine: Machine,
    items: Iterable[tuple[AdmissibleWord, Sequence]],
) -> Iterator[Relator]:
    """One relator per accepted configuration, each witness re-validated.

    Yields nothing for a configuration equal (up to rotation/inversion)
    to a relator already emitted, so the hub is never duplicated.
    """
    accept = machine.accept_config()
    seen = {Relator("hub", _config_word(accept)).canonical()}
    for word, witness in items:
        comp = run(machine, word, tuple(witness))
        if comp.final != accept:
            raise NotAccepted(f"witness for {word!r} does not reach the accept configuration")
        rel = Relator("disk", _config_word(word))
        key = rel.canonical()
        if key in seen:
            continue
        seen.add(key)
        yield rel


# ---------------------------------------------------------------------------
# relator oracles for the input-alphabet quotient


@dataclass(frozen=True)
class OracleAnswer:
    verdict: str  # "trivial" | "nontrivial" | "unknown"
    certificate: str = ""


class FreeTrivialOracle:
    """Sound and very incomplete: certifies only freely trivial words."""

    name = "free-trivial"

    def certify(self, w: Word) -> OracleAnswer:
        if not mul(w):
            return OracleAnswer("trivial", "freely reduces to the empty word")
        return OracleAnswer("unknown")


class PowerProductOracle:
    """Sound: certifies words presented as products of conjugated n-th powers.

    The decomposition [(v_1, u_1), ...] standing for prod v_i u_i^n v_i^-1
    travels with the query; without one the oracle answers unknown.
    """

    name = "power-product"

    def __init__(self, n: int):
        self.n = n

    def certify(
        self, w: Word, decomposition: Sequence[tuple[Word, Word]] | None = None
    ) -> OracleAnswer:
        if decomposition is None:
            return OracleAnswer("unknown")
        prod: Word = ()
        for v, u in decomposition:
            prod = mul(prod, v, power(u, self.n), inv(v))
        if prod == mul(w):
            return OracleAnswer(
                "trivial", f"product of {len(decomposition)} conjugated powers"
            )
        return OracleAnswer("unknown")


class ExponentAbelianizedOracle:
    """Necessary condition only: a nonzero letter-exponent mod n certifies
    nontriviality; a zero image proves nothing and stays unknown."""

    name = "exponent-abelianized"

    def __init__(self, n: int):
        self.n = n

    def certify(self, w: Word) -> OracleAnswer:
        sums: dict[str, int] = {}
        for x, s in w:
            sums[x] = (sums.get(x, 0) + s) % self.n
        if any(v % self.n for v in sums.values()):
            return OracleAnswer("nontrivial", "nonzero abelianized image mod n")
        return OracleAnswer("unknown", "abelianized image vanishes (necessary only)")


# ---------------------------------------------------------------------------
# emission


def fmt_gen_letter(x: GenLetter) -> str:
    kind, payload, sign = x
    if kind == "th":
        rid, idx = payload
        name = theta_name(rid, idx)
    else:
        name = str(payload)
    return name if sign == 1 else name + "^-1"


def emit_presentation(pres: Presentation, stream_limit: int = 0) -> str:
    """Deterministic text form: generator manifest then one relator per line."""
    lines = [f"presentation {pres.name}"]
    lines.append("generators q " + " ".join(pres.q_letters))
    lines.append("generators a " + " ".join(pres.a_letters))
    lines.append("generators theta " + " ".join(pres.theta_letters))
    for r in pres.relators:
        lines.append(f"relator {r.tag} " + " ".join(fmt_gen_letter(x) for x in r.word))
    if pres.streamed is not None and stream_limit:
        for _, r in zip(range(stream_limit), pres.streamed):
            lines.append(
                f"relator {r.tag} " + " ".join(fmt_gen_letter(x) for x in r.word)
            )
    return "\n".join(lines) + "\n"


def emit_flat(pres: Presentation, stream_limit: int = 0) -> str:
    """Generic computer-algebra form: one generators line, then relator lines."""
    gens = pres.q_letters + pres.a_letters + pres.theta_letters
    lines = [" ".join(gens)]
    rels = list(pres.relators)
    if pres.streamed is not None and stream_limit:
        rels.extend(r for _, r in zip(range(stream_limit), pres.streamed))
    for r in rels:
        lines.append(" ".join(fmt_gen_letter(x) for x in r.word))
    return "\n".join(lines) + "\n"
