"""Bounded exhaustive search over reduced computations.

Three engines with different guarantees:

* ``enumerate_reduced`` streams every reduced computation inside the
  budget, each exactly once, in length-lexicographic order.  Intended for
  small depths; the stream is the oracle behind the property suites.

* ``bounded_accept`` decides reachability of the accept configuration by
  breadth-first search over words.  Free reduction of histories preserves
  endpoints, so the shortest walk to a word is realized by a reduced
  computation: plain word-BFS is sound and its depth is the minimal
  accepting time.

* ``count_accepting`` counts reduced computations exactly via a layered
  dynamic program over (word, last rule) states with multiplicities.

Completeness is always qualified explicitly.  A width prune drops words
above a norm bound; results then hold for computations that stay within
that width, and the result records whether the prune ever fired.  With no
width prune the state space of these machines is genuinely infinite, so
honest desk-scale verification fixes a width and reports it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .core import (
    AdmissibleWord,
    Computation,
    Machine,
    MachineError,
    RuleElem,
    apply_rule,
    inv_elem,
    is_theta_admissible,
)
from .words import Word, nth_root


class BudgetExceeded(MachineError):
    def __init__(self, msg: str, explored: int):
        super().__init__(f"{msg} (explored {explored} nodes)")
        self.explored = explored


@dataclass(frozen=True)
class SearchBudget:
    """Bounds for the enumeration: depth, optional width, optional node cap.

    ``max_word_norm=None`` disables width pruning (the honest default);
    exceeding ``frontier_cap`` raises instead of silently truncating.
    """

    max_history: int
    max_word_norm: int | None = None
    frontier_cap: int | None = None

    def __post_init__(self) -> None:
        if self.max_history < 0:
            raise ValueError("max_history must be >= 0")
        if self.max_word_norm is not None and self.max_word_norm <= 0:
            raise ValueError("max_word_norm must be positive")
        if self.frontier_cap is not None and self.frontier_cap <= 0:
            raise ValueError("frontier_cap must be positive")


def _successors(
    machine: Machine, word: AdmissibleWord, last: RuleElem | None
) -> Iterator[tuple[RuleElem, AdmissibleWord]]:
    base = word.base()
    forbidden = inv_elem(last) if last is not None else None
    for elem in machine.elements():
        if elem == forbidden:
            continue
        rule = machine.rule(elem)
        if not is_theta_admissible(word, rule):
            continue
        nxt = apply_rule(word, rule)
        if nxt.base() != base:
            continue
        yield elem, nxt


def enumerate_reduced(
    machine: Machine, start: AdmissibleWord, budget: SearchBudget
) -> Iterator[Computation]:
    """All reduced computations from ``start`` within budget, length-lex order."""
    explored = 0
    layer: list[tuple[tuple[AdmissibleWord, ...], tuple[RuleElem, ...]]] = [
        ((start,), ())
    ]
    yield Computation(machine, (start,), ())
    depth = 0
    while layer and depth < budget.max_history:
        depth += 1
        nxt_layer = []
        for words, history in layer:
            last = history[-1] if history else None
            for elem, nxt in _successors(machine, words[-1], last):
                if (
                    budget.max_word_norm is not None
                    and nxt.norm > budget.max_word_norm
                ):
                    continue
                explored += 1
                if (
                    budget.frontier_cap is not None
                    and explored > budget.frontier_cap
                ):
                    raise BudgetExceeded("enumeration frontier cap hit", explored)
                item = (words + (nxt,), history + (elem,))
                nxt_layer.append(item)
                yield Computation(machine, item[0], item[1])
        layer = nxt_layer


@dataclass
class AcceptResult:
    """Outcome of a reachability search for the accept configuration."""

    accepted: bool
    witness: tuple[RuleElem, ...] | None
    explored: int
    pruned: int
    depth_bound: int
    width: int | None
    exhausted_at: int | None  # depth at which the frontier died, if it did
    frontier_cap_hit: bool = False

    @property
    def complete(self) -> bool:
        """True when non-acceptance is certain within the reported scope."""
        return self.accepted or not self.frontier_cap_hit

    def completeness(self) -> str:
        if self.accepted:
            return "witness"
        if self.frontier_cap_hit:
            return "incomplete:frontier-cap"
        scope = f"depth<={self.depth_bound}"
        if self.exhausted_at is not None:
            scope = f"all-depths(frontier died at {self.exhausted_at})"
        if self.pruned:
            scope += f", width<={self.width} ({self.pruned} words pruned)"
        return f"complete-relative:{scope}"


def bounded_accept(
    machine: Machine,
    start: AdmissibleWord,
    budget: SearchBudget,
    target: AdmissibleWord | None = None,
) -> AcceptResult:
    """Shortest-witness reachability of the accept configuration.

    Sound: any witness re-validates under ``run``.  Complete within the
    budget: a "rejected" answer rules out every reduced computation of
    length <= max_history whose words stay within the width bound.
    """
    if target is None:
        target = machine.accept_config()
    width = budget.max_word_norm
    explored = 0
    pruned = 0
    if start == target:
        return AcceptResult(True, (), 0, 0, budget.max_history, width, None)
    parents: dict[AdmissibleWord, tuple[AdmissibleWord, RuleElem] | None] = {
        start: None
    }
    frontier = [start]
    depth = 0
    exhausted = None
    cap_hit = False
    while frontier and depth < budget.max_history and not cap_hit:
        depth += 1
        nxt_frontier: list[AdmissibleWord] = []
        for word in frontier:
            for elem, nxt in _successors(machine, word, None):
                if nxt in parents:
                    continue
                if width is not None and nxt.norm > width:
                    pruned += 1
                    continue
                explored += 1
                if budget.frontier_cap is not None and explored > budget.frontier_cap:
                    cap_hit = True
                    break
                parents[nxt] = (word, elem)
                if nxt == target:
                    history: list[RuleElem] = []
                    cur = nxt
                    while parents[cur] is not None:
                        prev, e = parents[cur]
                        history.append(e)
                        cur = prev
                    history.reverse()
                    return AcceptResult(
                        True, tuple(history), explored, pruned,
                        budget.max_history, width, None,
                    )
                nxt_frontier.append(nxt)
            if cap_hit:
                break
        frontier = nxt_frontier
        if not frontier and not cap_hit:
            exhausted = depth
    return AcceptResult(
        False, None, explored, pruned, budget.max_history, width, exhausted,
        frontier_cap_hit=cap_hit,
    )


@dataclass
class CountResult:
    count: int
    example: tuple[RuleElem, ...] | None
    explored: int
    pruned: int
    depth_bound: int
    width: int | None
    exhausted_at: int | None


def count_accepting(
    machine: Machine,
    start: AdmissibleWord,
    *,
    max_depth: int,
    width: int | None = None,
    target: AdmissibleWord | None = None,
) -> CountResult:
    """Exact number of reduced accepting computations of length <= max_depth.

    Layered DP over (word, last rule) with path multiplicities; collapsing
    converging branches keeps the count exact while avoiding the
    exponential tree walk.  Width-pruned states are excluded from the
    count and tallied in ``pruned``.
    """
    if target is None:
        target = machine.accept_config()
    counts: dict[tuple[AdmissibleWord, RuleElem | None], int] = {(start, None): 1}
    total = 1 if start == target else 0
    example: tuple[RuleElem, ...] | None = () if start == target else None
    example_parent: dict[tuple[AdmissibleWord, RuleElem | None], tuple] = {
        (start, None): ()
    }
    explored = 0
    pruned = 0
    exhausted = None
    depth = 0
    while counts and depth < max_depth:
        depth += 1
        nxt: dict[tuple[AdmissibleWord, RuleElem | None], int] = {}
        nxt_parent: dict[tuple[AdmissibleWord, RuleElem | None], tuple] = {}
        for (word, last), mult in counts.items():
            for elem, nword in _successors(machine, word, last):
                if width is not None and nword.norm > width:
                    pruned += 1
                    continue
                explored += 1
                key = (nword, elem)
                nxt[key] = nxt.get(key, 0) + mult
                if key not in nxt_parent:
                    nxt_parent[key] = example_parent[(word, last)] + (elem,)
                if nword == target:
                    total += mult
                    if example is None:
                        example = example_parent[(word, last)] + (elem,)
        counts = nxt
        example_parent = nxt_parent
        if not counts:
            exhausted = depth
            break
    return CountResult(total, example, explored, pruned, max_depth, width, exhausted)


def m1_depth_bound(machine: Machine, start: AdmissibleWord) -> int:
    """Complete decision depth for the square detector: any reduced
    computation in the standard base has length at most
    (30n^2+24n) * max(norm of endpoints)."""
    n = machine.meta["n"]
    return (30 * n * n + 24 * n) * max(start.norm, machine.accept_config().norm)


def decide_accept_m1(
    machine: Machine,
    start: AdmissibleWord,
    *,
    width: int | None = None,
    frontier_cap: int | None = 2_000_000,
) -> AcceptResult:
    """Accept/reject for the square detector at its complete depth bound.

    With ``width=None`` the search is complete outright but the frontier
    is unbounded in practice; a width turns the answer into "complete for
    computations within that width", which the result records.
    """
    if machine.meta.get("builder") != "m1":
        raise MachineError("decide_accept_m1 expects the m1 machine")
    budget = SearchBudget(
        max_history=m1_depth_bound(machine, start),
        max_word_norm=width,
        frontier_cap=frontier_cap,
    )
    return bounded_accept(machine, start, budget)


def language_oracle(w: Word, n: int) -> bool:
    """Independent membership test: w equals u**n for some reduced u."""
    return nth_root(w, n) is not None


@dataclass
class TimeRow:
    size: int
    value: int | None
    witness_input: Word | None
    provenance: str


def _reduced_words(alphabet: tuple[str, ...], up_to: int) -> Iterator[Word]:
    letters = [(a, 1) for a in alphabet] + [(a, -1) for a in alphabet]
    layer: list[Word] = [()]
    yield ()
    for _ in range(up_to):
        nxt = []
        for w in layer:
            for x in letters:
                if w and w[-1][0] == x[0] and w[-1][1] == -x[1]:
                    continue
                nxt.append(w + (x,))
                yield w + (x,)
        layer = nxt


def time_function(
    machine: Machine, size_limit: int, budget: SearchBudget
) -> list[TimeRow]:
    """Max over accepted inputs of the minimal accepting time, by input size.

    Row m covers accepted inputs with at most m tape letters.  BFS depth
    of the first hit is the exact minimal time; completeness of each
    accept/reject verdict is inherited from the budget.
    """
    alphabet = machine.meta["alphabet"]
    best: dict[int, tuple[int, Word]] = {}
    bounded = False
    for w in _reduced_words(tuple(alphabet), size_limit):
        start = machine.input_config(w)
        res = bounded_accept(machine, start, budget)
        if res.accepted:
            t = len(res.witness)
            size = len(w)
            if size not in best or t > best[size][0]:
                best[size] = (t, w)
        elif not res.complete or res.pruned:
            bounded = True
    rows: list[TimeRow] = []
    running: tuple[int, Word] | None = None
    for m in range(size_limit + 1):
        if m in best and (running is None or best[m][0] > running[0]):
            running = best[m]
        prov = "budget-bounded" if bounded else "measured"
        rows.append(
            TimeRow(
                m,
                running[0] if running else None,
                running[1] if running else None,
                prov,
            )
        )
    return rows
