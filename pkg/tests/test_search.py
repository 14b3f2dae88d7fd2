import itertools

import pytest

from smforge.core import applicable_elements, run
from smforge.search import (
    BudgetExceeded,
    SearchBudget,
    bounded_accept,
    count_accepting,
    decide_accept_m1,
    enumerate_reduced,
    language_oracle,
    m1_depth_bound,
    time_function,
)
from smforge.tower import build_m1, build_m3, canonical_accepting_m3
from smforge.words import parse_word, power


@pytest.fixture(scope="module")
def m1():
    return build_m1(("a",), 2)


@pytest.fixture(scope="module")
def m1ab():
    return build_m1(("a", "b"), 2)


def test_enumerate_budget_zero(m1):
    w0 = m1.accept_config()
    comps = list(enumerate_reduced(m1, w0, SearchBudget(0)))
    assert len(comps) == 1 and comps[0].length == 0


def test_enumerate_depth_one_matches_admissibility(m1):
    w0 = m1.accept_config()
    comps = list(enumerate_reduced(m1, w0, SearchBudget(1)))
    applicable = [
        e for e in applicable_elements(m1, w0)
        if run(m1, w0, (e,)).final.base() == w0.base()
    ]
    assert len(comps) == 1 + len(applicable)


def test_enumerate_contains_canonical(m1):
    w0 = m1.input_config(parse_word("a a"))
    budget = SearchBudget(7, max_word_norm=w0.norm + 2)
    hits = [c for c in enumerate_reduced(m1, w0, budget) if c.final == m1.accept_config()]
    assert any(c.length == 7 for c in hits)


def test_enumerate_deterministic(m1):
    w0 = m1.input_config(parse_word("a a"))
    budget = SearchBudget(5, max_word_norm=w0.norm + 2)
    h1 = [c.history for c in enumerate_reduced(m1, w0, budget)]
    h2 = [c.history for c in enumerate_reduced(m1, w0, budget)]
    assert h1 == h2
    # length-lexicographic: lengths never decrease
    lengths = [c.length for c in enumerate_reduced(m1, w0, budget)]
    assert lengths == sorted(lengths)


def test_enumerate_frontier_cap(m1):
    w0 = m1.input_config(parse_word("a a"))
    with pytest.raises(BudgetExceeded):
        list(enumerate_reduced(m1, w0, SearchBudget(10, frontier_cap=5)))


def test_witnesses_revalidate(m1):
    w0 = m1.input_config(parse_word("a a"))
    res = decide_accept_m1(m1, w0, width=w0.norm + 2)
    assert res.accepted
    comp = run(m1, w0, res.witness)
    assert comp.final == m1.accept_config()
    assert comp.length == 7


def test_accept_examples(m1):
    assert decide_accept_m1(m1, m1.accept_config()).accepted
    assert decide_accept_m1(m1, m1.accept_config()).witness == ()
    w0 = m1.input_config(parse_word("a a a"))
    res = decide_accept_m1(m1, w0, width=w0.norm + 2)
    assert not res.accepted and res.complete


def test_depth_bound_formula(m1):
    w0 = m1.input_config(parse_word("a a"))
    assert m1_depth_bound(m1, w0) == (30 * 4 + 24 * 2) * w0.norm


def test_uniqueness_counts(m1ab):
    for text in ["1", "a a", "b b"]:
        w0 = m1ab.input_config(parse_word(text))
        res = count_accepting(
            m1ab, w0, max_depth=m1_depth_bound(m1ab, w0), width=w0.norm + 2
        )
        assert res.count == 1
        assert res.exhausted_at is not None  # search space died out


def test_oracle_agreement_small(m1ab):
    for letters in itertools.product(["a", "a^-1", "b", "b^-1"], repeat=2):
        try:
            w = parse_word(" ".join(letters))
        except ValueError:
            continue
        w0 = m1ab.input_config(w)
        res = decide_accept_m1(m1ab, w0, width=w0.norm + 2)
        assert res.accepted == language_oracle(w, 2)


def test_bounded_accept_m3_matches_canonical():
    m3 = build_m3(("a",), 2, 2)
    u = parse_word("a")
    w0 = m3.input_config(power(u, 2))
    res = bounded_accept(
        m3, w0, SearchBudget(40, max_word_norm=w0.norm + 2)
    )
    assert res.accepted
    assert res.witness == canonical_accepting_m3(m3, u)


def test_time_function(m1):
    budget = SearchBudget(200, max_word_norm=12)
    rows = time_function(m1, 2, budget)
    by_size = {r.size: r.value for r in rows}
    assert by_size[0] == 3  # empty input: transitions only
    assert by_size[2] == 7  # the square of one letter
    assert rows[2].provenance in ("measured", "budget-bounded")
