from __future__ import annotations

import io
import os
import sys
from contextlib import redirect_stdout
from fractions import Fraction

import pytest

from hoalg import fmt
from hoalg.cli import run
from hoalg.graded import MalformedInput
from hoalg.mc import ArtinRing

SAMPLE = """
# a two-dimensional acyclic complex with its shifted structure
space V
  x 0
  y 1

map d V V 1
  x -> y

space W
  u 0
  v 1

map q1 W W 1
  u -> -1*v

multilinear zero2 W W 1 2 symmetric

structure S W symmetric 3
  q 1 q1

map idw W W 0
  u -> u
  v -> v

morphism Id S S
  f 1 idw

space Z

map dz Z Z 1
map z2v Z V 0
map v2z V Z 0
map K V V -1
  y -> -1*x

contraction C Z V
  d_small dz
  d_big d
  inject z2v
  project v2z
  homotopy K

element xi W
  u t1 -> 2
  u t1^2 -> -3/2

element eta W
"""


def test_parse_roundtrip_objects():
    doc = fmt.parse(SAMPLE)
    assert doc.spaces["V"].degree["y"] == 1
    assert doc.maps["d"].value("x") == {"y": Fraction(1)}
    s = doc.structures["S"]
    assert s.taylor[1].value(("u",)) == {"v": Fraction(-1)}
    ring = ArtinRing(1, 3)
    xi = doc.element("xi", ring)
    assert xi.terms == {("u", (1,)): Fraction(2), ("u", (2,)): Fraction(-3, 2)}


def test_parse_vector_forms():
    assert fmt.parse_vector("0") == {}
    assert fmt.parse_vector("2/4*x + y - 3*z") == \
        {"x": Fraction(1, 2), "y": Fraction(1), "z": Fraction(-3)}


def test_parse_rejects_orphan_payload():
    with pytest.raises(MalformedInput):
        fmt.parse("  x 0\n")


def test_writer_reader_roundtrip():
    doc = fmt.parse(SAMPLE)
    lines = []
    lines.extend(fmt.space_lines("W", doc.spaces["W"]))
    lines.extend(fmt.map_lines("q1", doc.maps["q1"], "W", "W"))
    lines.extend(fmt.structure_lines("S", doc.structures["S"], "W", "s"))
    doc2 = fmt.parse("\n".join(lines))
    assert doc2.structures["S"].taylor[1] == doc.structures["S"].taylor[1]


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(argv)
    return code, buf.getvalue()


@pytest.fixture()
def sample_file(tmp_path):
    p = tmp_path / "sample.alg"
    p.write_text(SAMPLE)
    return str(p)


def test_cli_verify_structure_and_exit_codes(sample_file):
    code, out = run_cli(["verify", "structure", sample_file, "--name", "S"])
    assert code == 0
    assert "result: PASS" in out
    code, out = run_cli(["verify", "contraction", sample_file, "--name", "C"])
    assert code == 0


def test_cli_parse_error_is_exit_2(tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("space V\n  x zero\n")
    code, out = run_cli(["verify", "structure", str(bad), "--name", "S"])
    assert code == 2
    code, out = run_cli(["verify", "structure", str(tmp_path / "nope.alg"),
                         "--name", "S"])
    assert code == 2


def test_cli_mathematical_failure_is_exit_1(tmp_path):
    text = SAMPLE + """
map bad W W 0
  u -> 2*u
  v -> v

morphism Bad S S
  f 1 bad
"""
    p = tmp_path / "bad.alg"
    p.write_text(text)
    code, out = run_cli(["verify", "morphism", str(p), "--name", "Bad"])
    assert code == 1
    assert "status=FAIL" in out


def test_cli_mc_check_and_extend(sample_file):
    code, out = run_cli(["--artin", "1,3", "mc", "check", sample_file,
                         "--structure", "S", "--element", "xi"])
    assert code == 1  # q1(xi) != 0: not Maurer-Cartan
    assert "residual" in out
    code, out = run_cli(["--artin", "1,3", "mc", "check", sample_file,
                         "--structure", "S", "--element", "eta"])
    assert code == 0  # the zero element is Maurer-Cartan
    code, out = run_cli(["--artin", "1,4", "mc", "extend", sample_file,
                         "--structure", "S", "--element", "xi", "--order", "1"])
    assert code == 2  # element has terms beyond m^1: shape error
    code, out = run_cli(["--artin", "1,4", "mc", "extend", sample_file,
                         "--structure", "S", "--element", "xi", "--order", "3"])
    assert code == 1  # not Maurer-Cartan mod m^3, no lift claim


def test_cli_determinism_byte_identical():
    for argv in (["--max-weight", "3", "cocone", "explog", "--example", "r:1"],
                 ["--max-weight", "3", "--artin", "1,3", "yukawa", "v1",
                  "--example", "torus:2", "mc"],
                 ["example", "torus", "--n", "2"],
                 ["--max-weight", "3", "period", "minimal",
                  "--example", "synthetic:1"]):
        runs = [run_cli(argv) for _ in range(2)]
        assert runs[0] == runs[1]


def test_cli_machine_format():
    code, out = run_cli(["--format", "machine", "verify", "cartan",
                         "--example", "torus:1"])
    assert code == 0
    assert out.strip().endswith("result=pass")
    assert all(line.startswith(("RELATION", "result="))
               for line in out.strip().splitlines())


def test_cli_example_torus_matches_golden():
    code, out = run_cli(["example", "torus", "--n", "1"])
    assert code == 0
    golden = open(os.path.join(os.path.dirname(__file__), "golden",
                               "torus_n1.txt")).read().splitlines()
    tail = out.strip().splitlines()[-len(golden):]
    assert tail == golden


def test_cli_max_weight_env_override(monkeypatch):
    monkeypatch.setenv("HOALG_MAX_WEIGHT", "2")
    from hoalg.cli import build_parser
    args = build_parser().parse_args(["verify", "cartan", "--example", "torus:1"])
    assert args.max_weight == 2


def test_cli_determinism_across_processes():
    import subprocess
    argv = ["hoalg", "--max-weight", "3", "--artin", "1,3", "yukawa", "v1",
            "--example", "torus:2", "mc"]
    outs = []
    for _ in range(2):
        proc = subprocess.run(argv, capture_output=True, text=True)
        outs.append((proc.returncode, proc.stdout))
    assert outs[0] == outs[1]
    assert outs[0][0] == 0
