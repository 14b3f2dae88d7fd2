import pytest

from smforge.checks import (
    check_parallel_equivariance,
    check_transition_probing,
    expected_m2_rule_count,
)
from smforge.combinators import (
    AlreadyCyclic,
    EmptyAlphabet,
    ShapeMismatch,
    TransitionSpec,
    concatenate,
    cyclize,
    lr,
    parallel,
    rl,
)
from smforge.core import AdmissibleWord, apply_rule, is_theta_admissible
from smforge.search import SearchBudget, enumerate_reduced
from smforge.serialize import machine_to_text
from smforge.tower import build_m1, build_m2, build_m4, build_m52
from smforge.words import parse_word


def test_lr_rule_count():
    assert len(lr(("a", "b")).positive_rules) == 5  # 2 + 1 + 2
    assert len(rl(("a", "b")).positive_rules) == 5
    with pytest.raises(EmptyAlphabet):
        lr(())


@pytest.mark.parametrize("length", [0, 1, 2, 3, 4])
def test_lr_standard_run_is_unique_with_length(length):
    """From q(1) u p(1) q(2) exactly one reduced run reaches q(1) u p(2) q(2);
    it takes 2|u|+1 steps at constant tape length."""
    m = lr(("a", "b"))
    u = tuple((("a", "b")[i % 2] + "^(1)", 1) for i in range(length))
    hw = m.hardware
    start = AdmissibleWord(hw, (("q^(1)", 1), ("p^(1)", 1), ("q^(2)", 1)), (u, ()))
    target = AdmissibleWord(hw, (("q^(1)", 1), ("p^(2)", 1), ("q^(2)", 1)), (u, ()))
    hits = []
    for comp in enumerate_reduced(
        m, start, SearchBudget(2 * length + 3, max_word_norm=start.norm + 2)
    ):
        if comp.final == target:
            hits.append(comp)
    exact = [c for c in hits if c.length == 2 * length + 1]
    assert len(exact) == 1
    assert all(w.a_len == length for w in exact[0].words)
    # no other run within the probed depth reaches the target
    assert len(hits) == 1


def test_lr_empty_run_is_connecting_rule():
    m = lr(("a",))
    start = m.word("q^(1) p^(1) q^(2)")
    out = apply_rule(start, m.rule(("zeta12", 1)))
    assert out == m.word("q^(1) p^(2) q^(2)")


def test_concatenate_single_machine_identity():
    m = lr(("a",))
    again = concatenate([m], [], name=m.name)
    assert machine_to_text(again) == machine_to_text(m)


def test_concatenate_m1_rule_count():
    m1 = build_m1(("a", "b"), 2)
    assert len(m1.positive_rules) == 2 * 2 * 2 + (2 * 2 - 1)  # 2n|A| + (2n-1)


def test_concatenate_transition_count_mismatch():
    m = lr(("a",))
    with pytest.raises(ShapeMismatch):
        concatenate([m], [TransitionSpec("t", "lr", "lr")], name="bad")


def test_m2_rule_tally():
    for (n, k, letters) in [(2, 2, 2), (2, 3, 1), (3, 2, 2)]:
        alphabet = tuple("ab"[:letters])
        m2 = build_m2(alphabet, n, k)
        assert len(m2.positive_rules) == expected_m2_rule_count(letters, n, k)


def test_transition_rules_probe(tmp_path):
    res = check_transition_probing(("a", "b"), 2, 2)
    assert res.passed, res.details


def test_parallel_preserves_rule_count():
    m4 = build_m4(("a",), 2, 2)
    m5 = parallel(m4, 3, name="p3")
    assert len(m5.positive_rules) == len(m4.positive_rules)
    assert m5.validate() == []


def test_parallel_single_copy_isomorphic():
    m4 = build_m4(("a",), 2, 2)
    m5 = parallel(m4, 1, name="p1")
    assert len(m5.positive_rules) == len(m4.positive_rules)
    assert m5.hardware.nparts == m4.hardware.nparts
    assert all(p.name.endswith("@1") for p in m5.hardware.parts)


def test_m52_locks_special_sector_everywhere():
    m52 = build_m52(("a",), 2, 2, 3)
    special = m52.meta["special_sector"]
    table = m52.meta["sector_copy"][special]
    for r in m52.positive_rules:
        assert special in r.locks
    # any word with a nonempty special sector fails every rule
    cfg = m52.input_config(parse_word("a a"))
    assert cfg.tapes[special - 1]  # config_i fills it
    assert all(
        not is_theta_admissible(cfg, m52.rule(e)) for e in m52.elements()
    )


def test_cyclize_base_length_and_wrap():
    m4 = build_m4(("a", "b"), 2, 2)
    assert m4.hardware.nparts == 11
    assert m4.hardware.cyclic
    with pytest.raises(AlreadyCyclic):
        cyclize(m4, "S", name="again")
    acc = m4.accept_config()
    assert acc.q_len == 11
    # wrap-around base: the standard circle read from t back to t
    hw = m4.hardware
    qs = tuple((p.letters[0], 1) for p in hw.parts) + ((hw.parts[0].letters[0], 1),)
    w = AdmissibleWord(hw, qs, ((),) * (len(qs) - 1))
    assert w.base()[0] == w.base()[-1]


def test_cyclize_mirrored_wrap_base_admissible():
    # Q0^-1 P0^-1 t^-1 Q4^-1 P4^-1 . P4 Q4 t P0 Q0: descends through the
    # wrap sector, bounces at P4^-1 P4, and climbs back
    m4 = build_m4(("a", "b"), 2, 2)
    hw = m4.hardware
    start = m4.start_letters()
    up = [(start[i], 1) for i in (9, 10, 0, 1, 2)]  # P4 Q4 t P0 Q0
    down = [(name, -s) for name, s in reversed(up)]
    a8 = "a_8"  # a letter of the sector between Q3 and P4
    w = AdmissibleWord(
        hw,
        tuple(down + up),
        ((), (), (), (), ((a8, -1),), (), (), (), ()),
    )
    names = [nm for nm, _ in w.base_names()]
    assert names == ["Q0", "P0", "T", "Q4", "P4", "P4", "Q4", "T", "P0", "Q0"]


def test_combinator_outputs_validate():
    for m in (lr(("a",)), rl(("a", "b")), build_m2(("a",), 2, 2), build_m4(("a",), 2, 2)):
        assert m.validate() == []


def test_parallel_equivariance():
    res = check_parallel_equivariance(("a", "b"), 2, 2, 3, seed=11)
    assert res.passed, res.details
