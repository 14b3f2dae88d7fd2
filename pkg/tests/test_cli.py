import subprocess
import sys
from pathlib import Path

import pytest

from smforge.cli import main

PARAMS = "alphabet = ab\nn = 2\nk = 2\nL = 3\n"


@pytest.fixture()
def params_file(tmp_path):
    p = tmp_path / "tower.params"
    p.write_text(PARAMS)
    return str(p)


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_build_and_reload(params_file, tmp_path, capsys):
    out_file = tmp_path / "m1.machine"
    code, _, _ = run_cli(
        ["build", "--machine", "m1", "--params", params_file, "--out", str(out_file)],
        capsys,
    )
    assert code == 0
    code, out, err = run_cli(
        ["accept", "--machine", str(out_file), "--input", "aa", "--bound", "64",
         "--complete-m1"],
        capsys,
    )
    assert code == 0
    assert out.splitlines()[0].startswith("0\t-\t")


def test_build_declarative(params_file, capsys):
    code, out, _ = run_cli(
        ["build", "--machine", "m3", "--params", params_file, "--declarative"], capsys
    )
    assert code == 0
    assert out == "tower m3 alphabet=a,b n=2 k=2 L=3\n"


def test_accept_exit_codes(params_file, capsys):
    code, _, err = run_cli(
        ["accept", "--machine", "m1", "--params", params_file, "--input", "ab",
         "--complete-m1"],
        capsys,
    )
    assert code == 1  # rejected, completely (within the reported width)
    assert "accepted=False" in err


def test_run_canonical_trace(params_file, capsys):
    code, out, _ = run_cli(
        ["run", "--machine", "m1", "--params", params_file, "--input", "a",
         "--canonical"],
        capsys,
    )
    assert code == 0
    assert len(out.splitlines()) == 8  # start row + 7 steps


def test_present_determinism(params_file, capsys):
    code1, out1, _ = run_cli(
        ["present", "--machine", "m1", "--params", params_file, "--group", "g"], capsys
    )
    code2, out2, _ = run_cli(
        ["present", "--machine", "m1", "--params", params_file, "--group", "g"], capsys
    )
    assert code1 == code2 == 0 and out1 == out2
    assert "relator hub" in out1


def test_diagram_un_dot(params_file, capsys):
    code, out, err = run_cli(
        ["diagram", "--machine", "m", "--params", params_file, "--kind", "un",
         "--in", "a", "--metrics", "--export", "dot"],
        capsys,
    )
    assert code == 0
    assert out.startswith("graph")
    assert "# area 2793 [measured]" in err


def test_bench_area_table(params_file, tmp_path, capsys):
    prefix = str(tmp_path / "bench")
    code, out, _ = run_cli(
        ["bench-area", "--params", params_file, "--max-len", "2",
         "--out-prefix", prefix],
        capsys,
    )
    assert code == 0
    assert "pass" in out
    assert Path(prefix + ".tsv").exists()
    svg = Path(prefix + ".svg").read_text()
    assert svg.startswith("<svg")


def test_verify_lemmas_exit_codes(params_file, capsys):
    code, out, _ = run_cli(["verify-lemmas", "m3", "--params", params_file], capsys)
    assert code == 0
    assert "pass" in out
    code, _, err = run_cli(["verify-lemmas", "nonsense"], capsys)
    assert code == 2
    assert "unknown suite" in err


def test_console_script_exists():
    proc = subprocess.run(
        [sys.executable, "-m", "smforge.cli", "verify-lemmas", "nonsense"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
