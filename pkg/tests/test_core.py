import random

import pytest

from smforge.checks import check_inverse_involution, random_admissible_for
from smforge.combinators import lr
from smforge.core import (
    AdmissibleWord,
    FailsAtStep,
    Hardware,
    Machine,
    NotAdmissible,
    NotNormalizable,
    Part,
    RawRule,
    apply_rule,
    canonical_step_history,
    fmt_admissible,
    is_theta_admissible,
    normalize_raw_rule,
    normalize_rules,
    project_to_input,
    run,
    step_history,
)
from smforge.serialize import machine_to_text
from smforge.tower import build_m1, canonical_accepting_m1
from smforge.words import parse_word, power


@pytest.fixture(scope="module")
def m1():
    return build_m1(("a", "b"), 2)


def test_admissible_word_shape_rejections(m1):
    hw = m1.hardware
    with pytest.raises(NotAdmissible):
        AdmissibleWord(hw, (), ())  # no state letters
    with pytest.raises(NotAdmissible):
        # tape letter from the wrong sector
        AdmissibleWord(hw, (("q0(1)", 1), ("q1(1)", 1)), ((("a_3", 1),),))
    with pytest.raises(NotAdmissible):
        # cancelling pair with empty tape between
        AdmissibleWord(hw, (("q0(1)", 1), ("q0(1)", -1)), ((),))
    with pytest.raises(NotAdmissible):
        # skips a part
        AdmissibleWord(hw, (("q0(1)", 1), ("q2(1)", 1)), ((),))


def test_is_theta_admissible_examples(m1):
    w = m1.word("q0(1) a_1 q1(1) q2(1) q3(1) q4(1)")
    assert is_theta_admissible(w, m1.rule(("tau_1(a)", 1)))
    # phase-2 rule against phase-1 state letters
    assert not is_theta_admissible(w, m1.rule(("sigma(2,3)", 1)))
    # locked sector holds a letter
    w2 = m1.word("q0(1) q1(1) a_2 q2(1) q3(1) q4(1)")
    assert not is_theta_admissible(w2, m1.rule(("tau_1(a)", 1)))


def test_apply_moves_one_letter(m1):
    w = m1.word("q0(1) a_1 q1(1) q2(1) q3(1) q4(1)")
    out = apply_rule(w, m1.rule(("tau_1(a)", 1)))
    assert fmt_admissible(out) == "q0(1) q1(1) q2(1) a_3 q3(1) q4(1)"


def test_apply_requires_admissibility(m1):
    w = m1.word("q0(1) q1(1) a_2 q2(1) q3(1) q4(1)")
    with pytest.raises(NotAdmissible):
        apply_rule(w, m1.rule(("tau_1(a)", 1)))


def test_lr_primitive_step():
    m = lr(("a",))
    w = m.word("q^(1) a^(1) p^(1) q^(2)")
    out = apply_rule(w, m.rule(("zeta1(a)", 1)))
    assert fmt_admissible(out) == "q^(1) p^(1) a^(2) q^(2)"


def test_inverse_involution_randomized(m1):
    result = check_inverse_involution(m1, seed=7, trials=200)
    assert result.passed, result.details


def test_run_canonical_and_failures(m1):
    u = parse_word("a")
    w0 = m1.input_config(power(u, 2))
    comp = run(m1, w0, canonical_accepting_m1(m1, u))
    assert comp.length == 7
    assert comp.final == m1.accept_config()
    assert run(m1, w0, ()).length == 0
    with pytest.raises(FailsAtStep) as err:
        run(m1, m1.accept_config(), (("tau_1(a)", 1),))
    assert err.value.index == 0
    # the failure agrees with the admissibility predicate
    assert not is_theta_admissible(m1.accept_config(), m1.rule(("tau_1(a)", 1)))


def test_step_history_examples(m1):
    h = (("tau_1(a)", 1), ("sigma(1,2)", 1), ("tau_2(a)", 1))
    assert step_history(m1, h) == ("(1)", "(1,2)", "(2)")
    assert step_history(m1, ()) == ()
    full = canonical_accepting_m1(m1, parse_word("a"))
    assert step_history(m1, full) == (
        "(1)", "(1,2)", "(2)", "(2,3)", "(3)", "(3,4)", "(4)",
    )
    # the omission convention drops forced transition letters
    assert canonical_step_history(m1, full) == ("(1)", "(2)", "(3)", "(4)")
    # inverse transitions read backwards
    assert step_history(m1, (("sigma(1,2)", -1),)) == ("(2,1)",)


def test_step_history_merges_runs(m1):
    h = (("tau_1(a)", 1), ("tau_1(b)", 1), ("tau_1(a)", -1))
    assert step_history(m1, h) == ("(1)",)


def test_projection_examples(m1):
    w = m1.word("q0(1) a_1 q1(1) q2(1) a_3^-1 q3(1) q4(1)")
    assert project_to_input(m1, w) == ()
    w0 = m1.input_config(parse_word("a a"))
    assert project_to_input(m1, w0) == parse_word("a a")
    out = apply_rule(w0, m1.rule(("tau_1(a)", 1)))
    assert project_to_input(m1, out) == parse_word("a a")


def test_normalize_rules_identity(m1):
    again = normalize_rules(m1)
    assert machine_to_text(again) == machine_to_text(m1)


def test_normalize_rules_empty_machine():
    hw = Hardware((Part("Q", ("q",), "q", "q"),), ())
    m = Machine("empty", hw, [])
    out = normalize_rules(m)
    assert out.positive_rules == ()


def test_normalize_two_letter_base_rule(m1):
    # raw form: q2(2) a_3 q3(2) -> a_2 q2(2) q3(2), with the action biased
    # to the moving part exactly as the built-in rule attributes it
    hw = m1.hardware
    raw = RawRule(
        rid="raw",
        qs=tuple((f"q{x}(2)", f"q{x}(2)") for x in range(5)),
        sector_words=((), ()) * 0 + (((), ()), ((), (("a_2", 1),)), ((("a_3", 1),), ()), ((), ())),
        locks=frozenset({4}),
        bias=(None, "right", "left", None),
    )
    rule = normalize_raw_rule(hw, raw)
    built = m1.rule(("tau_2(a)", 1))
    assert rule.parts == built.parts
    assert rule.locks == built.locks


def test_normalize_unsplittable_rule():
    hw = Hardware(
        (Part("Q0", ("q0",), "q0", "q0"), Part("Q1", ("q1",), "q1", "q1")),
        [("x", "y")],
    )
    # x -> y splits (insert y in front, erase x at the back) ...
    raw_ok = RawRule(
        rid="swap1",
        qs=(("q0", "q0"), ("q1", "q1")),
        sector_words=(((("x", 1),), (("y", 1),)),),
    )
    rule = normalize_raw_rule(hw, raw_ok)
    assert rule.parts[0].right == (("y", 1),)
    assert rule.parts[1].left == (("x", -1),)
    # ... but rewriting two letters at once exceeds one letter per side
    raw_bad = RawRule(
        rid="swap2",
        qs=(("q0", "q0"), ("q1", "q1")),
        sector_words=(((("x", 1), ("x", 1)), (("y", 1), ("y", 1))),),
    )
    with pytest.raises(NotNormalizable):
        normalize_raw_rule(hw, raw_bad)


def test_mirrored_window_rewrites_by_conjugation():
    # a doubled-back window transforms by conjugation, so its base never
    # collapses: one-letter-base rules preserve bases outright
    hw = Hardware(
        (Part("Q0", ("q0",), "q0", "q0"), Part("Q1", ("q1", "q1'"), "q1", "q1")),
        [("x", "y")],
    )
    from smforge.core import Rule, RulePart

    rule = Rule(
        rid="conj",
        sign=1,
        parts=(RulePart("q0", "q0"), RulePart("q1", "q1'", (("x", 1),), ())),
        tag="(1)",
    )
    w = AdmissibleWord(hw, (("q1", -1), ("q1", 1)), ((("y", 1),),))
    out = apply_rule(w, rule)
    assert out.base() == w.base()
    assert out.tapes[0] == (("x", -1), ("y", 1), ("x", 1))
    # conjugating a mirrored x-content cancels but never empties
    w2 = AdmissibleWord(hw, (("q1", -1), ("q1", 1)), (parse_word("x y x^-1"),))
    out2 = apply_rule(w2, rule)
    assert out2.tapes[0] == parse_word("y") and out2.base() == w2.base()


def test_random_admissible_words_validate(m1):
    rng = random.Random(3)
    for _ in range(50):
        rule = rng.choice(m1.positive_rules)
        w = random_admissible_for(m1, rule, rng, 3)
        assert is_theta_admissible(w, rule)
        assert w.norm == w.q_len + w.a_len
