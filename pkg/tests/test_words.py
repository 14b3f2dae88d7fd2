import pytest

from smforge.words import (
    cyclic_reduce,
    inv,
    mul,
    nth_root,
    parse_word,
    power,
    reduce_letters,
)


def w(text):
    return parse_word(text)


def test_reduction_cancels_adjacent_inverses():
    assert mul(w("a b"), w("b^-1 c")) == w("a c")
    assert mul(w("a"), w("a^-1")) == ()
    assert reduce_letters([("a", 1), ("a", -1), ("b", 1)]) == [("b", 1)]


def test_inverse_and_power():
    u = w("a b^-1")
    assert inv(u) == w("b a^-1")
    assert power(u, 2) == w("a b^-1 a b^-1")
    assert power(u, 0) == ()
    assert power(u, -1) == inv(u)


def test_power_of_conjugate_reduces():
    u = w("a b a^-1")
    assert power(u, 3) == w("a b b b a^-1")


def test_cyclic_reduce():
    core, x = cyclic_reduce(w("a b c b^-1 a^-1"))
    assert core == w("c") and x == w("a b")
    assert cyclic_reduce(w("a b")) == (w("a b"), ())


@pytest.mark.parametrize(
    "text,n,root",
    [
        ("a a", 2, "a"),
        ("a b a b", 2, "a b"),
        ("a b a b a b", 3, "a b"),
        ("a b b b a^-1", 3, "a b a^-1"),
        ("1", 5, "1"),
    ],
)
def test_nth_root_positive(text, n, root):
    assert nth_root(w(text), n) == w(root)


@pytest.mark.parametrize("text,n", [("a b", 2), ("a a b", 2), ("a a a", 2), ("a", 2)])
def test_nth_root_negative(text, n):
    assert nth_root(w(text), n) is None


def test_parse_rejects_unreduced():
    with pytest.raises(ValueError):
        parse_word("a a^-1")
