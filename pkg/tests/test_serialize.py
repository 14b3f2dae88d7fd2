import pytest

from smforge.combinators import lr
from smforge.core import MachineError, run
from smforge.serialize import (
    machine_from_text,
    machine_to_text,
    tower_line,
    trace_from_text,
    trace_to_text,
)
from smforge.tower import build_m1, build_m2, canonical_accepting_m1
from smforge.words import parse_word, power


@pytest.mark.parametrize(
    "machine", [lr(("a", "b")), build_m1(("a", "b"), 2), build_m2(("a",), 2, 2)]
)
def test_machine_round_trip_bit_exact(machine):
    text = machine_to_text(machine)
    again = machine_from_text(text)
    assert machine_to_text(again) == text


def test_rebuilt_machine_still_runs():
    m1 = build_m1(("a",), 2)
    again = machine_from_text(machine_to_text(m1))
    u = parse_word("a")
    h = canonical_accepting_m1(m1, u)
    comp = run(again, again.input_config(power(u, 2)), h)
    assert comp.final == again.accept_config()


def test_tower_line_rebuild():
    line = tower_line("m2", ("a", "b"), 2, 2, 3)
    m = machine_from_text(line)
    assert machine_to_text(m) == machine_to_text(build_m2(("a", "b"), 2, 2))


def test_trace_round_trip():
    m1 = build_m1(("a",), 2)
    u = parse_word("a")
    comp = run(m1, m1.input_config(power(u, 2)), canonical_accepting_m1(m1, u))
    text = trace_to_text(comp)
    again = trace_from_text(m1, text)
    assert trace_to_text(again) == text
    assert again.history == comp.history


def test_trace_rejects_corruption():
    m1 = build_m1(("a",), 2)
    u = parse_word("a")
    comp = run(m1, m1.input_config(power(u, 2)), canonical_accepting_m1(m1, u))
    lines = trace_to_text(comp).splitlines()
    assert "q2(1)" in lines[1]
    lines[1] = lines[1].replace("q2(1)", "q2(2)")
    with pytest.raises(MachineError):
        trace_from_text(m1, "\n".join(lines))


def test_bad_header_rejected():
    with pytest.raises(MachineError):
        machine_from_text("not-a-machine 9\n")
