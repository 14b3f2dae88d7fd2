import pytest

from smforge.checks import (
    check_m_components,
    check_m_language,
    check_m_turn,
    designated_block,
)
from smforge.core import is_theta_admissible, run, step_history
from smforge.tower import (
    InvalidParams,
    TowerParams,
    accept_config,
    base_flags,
    build,
    build_m,
    build_m1,
    build_m3,
    build_m4,
    build_m51,
    build_m52,
    canonical_accepting,
    canonical_accepting_m,
    canonical_accepting_m1,
    component,
    config_i,
    config_j,
    coordinate_shift,
    parse_params,
    reverted_base,
)
from smforge.words import parse_word, power

A2 = ("a", "b")


@pytest.fixture(scope="module")
def mm():
    return build_m(A2, 2, 2, 3)


def test_params_validation():
    with pytest.raises(InvalidParams):
        TowerParams(alphabet=())
    with pytest.raises(InvalidParams):
        TowerParams(alphabet=A2, n=1)
    with pytest.raises(InvalidParams):
        TowerParams(alphabet=A2, L=2)
    p = parse_params("alphabet = ab\nn = 3\nk = 2\nL = 4\n# comment\n")
    assert p == TowerParams(("a", "b"), 3, 2, 4)
    with pytest.raises(InvalidParams):
        build("m9", TowerParams(A2))


def test_m1_shape():
    m1 = build_m1(A2, 2)
    assert m1.hardware.nparts == 5
    assert len(m1.positive_rules) == 11
    assert m1.validate() == []


@pytest.mark.parametrize("n", [2, 3])
def test_m1_canonical_length_formula(n):
    m1 = build_m1(A2, n)
    for text in ["1", "a", "b^-1", "a b", "a a", "b a^-1"]:
        u = parse_word(text)
        h = canonical_accepting_m1(m1, u)
        comp = run(m1, m1.input_config(power(u, n)), h)
        assert comp.length == 2 * n * len(u) + 2 * n - 1
        assert comp.final == m1.accept_config()


def test_m3_designated_subcomputation_example():
    m3 = build_m3(A2, 2, 4)
    block, _ = designated_block(m3, parse_word("a"))
    assert block == 2 * 4 * 1 + 2 * 4 + 1  # 17


def test_m_shape_and_rule_count(mm):
    m51 = build_m51(A2, 2, 2, 3)
    m52 = build_m52(A2, 2, 2, 3)
    assert len(mm.positive_rules) == len(m51.positive_rules) + len(m52.positive_rules) + 4
    assert mm.hardware.nparts == 33
    assert mm.validate() == []


def test_m4_base_length():
    assert build_m4(A2, 2, 2).hardware.nparts == 11


def test_m_language_criterion(mm):
    res = check_m_language(A2, 2, 2, 3)
    assert res.passed, res.details


def test_m_lane2_rejects_full_input(mm):
    w = power(parse_word("a"), 2)
    assert not is_theta_admissible(config_i(mm, w), mm.rule(("theta(s)_2", 1)))
    assert is_theta_admissible(config_j(mm, w), mm.rule(("theta(s)_2", 1)))
    assert is_theta_admissible(config_i(mm, w), mm.rule(("theta(s)_1", 1)))


def test_m_lanes_differ_for_empty_input(mm):
    h1 = canonical_accepting_m(mm, (), 1)
    h2 = canonical_accepting_m(mm, (), 2)
    assert h1 != h2
    assert run(mm, config_i(mm, ()), h1).final == accept_config(mm)
    assert run(mm, config_j(mm, ()), h2).final == accept_config(mm)


def test_m_turn(mm):
    res = check_m_turn(A2, 2, 2, 3)
    assert res.passed, res.details


def test_components_and_shifts(mm):
    res = check_m_components(A2, 2, 2, 3)
    assert res.passed, res.details
    w = power(parse_word("a"), 2)
    I = config_i(mm, w)
    c2 = component(mm, I, 2)
    c3 = component(mm, I, 3)
    assert coordinate_shift(mm, c2, 3) == c3
    assert coordinate_shift(mm, c2, 2) == c2


def test_reverted_base_worked_example(mm):
    base = (
        ("Q4@1", 1), ("T@2", 1), ("P0@2", 1), ("Q0@2", 1),
        ("P1@2", 1), ("Q1@2", 1), ("Q1@2", -1), ("P1@2", -1),
    )
    assert reverted_base(mm, base) == (
        ("Q4", 1), ("T", 1), ("P0", 1), ("Q0", 1),
        ("P1", 1), ("Q1", 1), ("Q1", -1), ("P1", -1),
    )


def test_base_flags_examples(mm):
    ppc = mm.meta["parts_per_copy"]
    std = config_i(mm, ()).base_names()

    def inv_rev(seg):
        return tuple((nm, -s) for nm, s in reversed(seg))

    # reduced standard base: no flags at all
    flags = base_flags(mm, std)
    assert not any(flags.values())

    # a straight segment from t(1) to t(2): pararevolving, not revolving
    straight = std[: ppc + 1]
    flags = base_flags(mm, straight)
    assert flags["pararevolving"] and not flags["revolving"]
    assert not flags["hyperfaulty"]

    # full circle t(1)...t(1): revolving, not faulty, not pararevolving
    circle = std + (std[0],)
    flags = base_flags(mm, circle)
    assert flags["revolving"] and not flags["faulty"]
    assert not flags["pararevolving"]

    # bounce at a mirrored pair of a *different* coordinate: faulty but
    # not hyperfaulty, because forgetting coordinates repeats letters
    walk = std[10 : 2 * ppc + 3]  # Q4(1) t(2) ... P0(3) Q0(3)
    faulty_base = (walk[-1],) + inv_rev(walk) + walk
    flags = base_flags(mm, faulty_base)
    assert flags["revolving"] and flags["faulty"]
    assert not flags["pararevolving"] and not flags["hyperfaulty"]

    # bounce inside one coordinate block around the special sector:
    # the reversion is still revolving, hence hyperfaulty
    seg = std[2 * ppc + 3 :]  # P1(3) ... Q4(3)
    hyper = (
        (("P0@1", 1), ("Q0@1", 1), ("Q0@1", -1), ("P0@1", -1), ("T@1", -1))
        + inv_rev(seg)
        + seg
        + (("T@1", 1), ("P0@1", 1))
    )
    flags = base_flags(mm, hyper)
    assert flags["faulty"] and flags["pararevolving"] and flags["hyperfaulty"]

    # tight: an alien prefix before a revolving tail
    loop2 = std[ppc : 2 * ppc] + (std[ppc],)  # t(2) ... Q4(2) t(2)
    tight = (("Q3@1", 1),) + loop2
    flags = base_flags(mm, tight)
    assert flags["tight"] and not flags["revolving"]
    assert not base_flags(mm, loop2[:-1] + (("Q3@1", 1),))["tight"]


def test_m_controlled_block_length(mm):
    """Inside a lane run, each twin-primitive block takes exactly
    |W(i)|_a + 3 steps, the component tape length at block entry."""
    u = parse_word("a")
    h = canonical_accepting_m(mm, u, 1)
    comp = run(mm, config_i(mm, power(u, 2)), h)
    n, k = mm.meta["n"], mm.meta["k"]
    enter = (f"m1:theta({4 * n - 2},{4 * n - 1})", 1)
    first_chi = ("m1:chi(1,2)", 1)
    i0 = h.index(enter)
    i1 = h.index(first_chi)
    controlled = h[i0 : i1 + 1]  # entry rule .. first connecting transition
    entry_word = comp.words[i0]
    comp_len = component(mm, entry_word, 2).a_len
    assert len(controlled) == comp_len + 3


def test_canonical_dispatch(mm):
    u = parse_word("b")
    for machine in (build_m1(A2, 2), build_m3(A2, 2, 2), build_m51(A2, 2, 2, 3)):
        h = canonical_accepting(machine, u)
        start = machine.input_config(power(u, 2))
        assert run(machine, start, h).final == machine.accept_config()


def test_step_history_letters_of_m_run(mm):
    h = canonical_accepting_m(mm, parse_word("a"), 1)
    sh = step_history(mm, h)
    assert sh[0] == "(s)_1"
    assert sh[-1] == "(a)_1"
    assert "(1)_1" in sh and "(7)_1" in sh
