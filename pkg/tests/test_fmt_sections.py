from __future__ import annotations

import io
from contextlib import redirect_stdout
from fractions import Fraction

import pytest

from hoalg import fmt
from hoalg.cli import run
from hoalg.hodge import check_cartan, check_hodge_package

FULL = """
# a miniature package exercising every section kind
space V
  c 1 (1,0)
  cb 2 (1,1)

map dV V V 1
  c -> cb

map zeroV V V 1

space E
  id<-c 0
  cb<-c 1

map dE E E 1

multilinear brE E E 0 2 tensor

dgla EndL E
  d dE
  bracket brE

multilinear muE E E 0 2 tensor
  (id<-c, id<-c) -> id<-c
  (id<-c, cb<-c) -> cb<-c

dgalgebra EndA E
  d dE
  product muE

map idE E E 0
  id<-c -> id<-c
  cb<-c -> cb<-c

dglamorphism incL EndL EndL idE
dgamorphism incA EndA EndA idE

splitting SP EndA
  complement cb<-c

space H
  h0 0 (0,0)

space A2
  one 0 (0,0)
  e 0 (0,0)
  de 1 (0,1)

map del2 A2 A2 1
map delbar2 A2 A2 1
  e -> de
map h2 A2 A2 -1
  de -> -1*e
map iota2 H A2 0
  h0 -> one
map pi2 A2 H 0
  one -> h0

hodge PKG A2 H 1
  del del2
  delbar delbar2
  h h2
  inject iota2
  project pi2

space L1
  x 1

map dL1 L1 L1 1
multilinear brL1 L1 L1 0 2 tensor

dgla LL L1
  d dL1
  bracket brL1

map ix A2 A2 0

cartan CC LL A2 delbar2
  x -> ix
"""


def test_parse_every_section_kind():
    doc = fmt.parse(FULL)
    assert doc.dglas["EndL"].check().ok
    assert doc.dgalgebras["EndA"].check().ok
    assert doc.dglamorphisms["incL"].check().ok
    assert doc.dgamorphisms["incA"].check().ok
    assert doc.splittings["SP"].complement_names == ("cb<-c",)
    assert check_hodge_package(doc.hodges["PKG"]).ok
    assert check_cartan(doc.cartans["CC"]).ok


def run_cli(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = run(argv)
    return code, buf.getvalue()


@pytest.fixture()
def full_file(tmp_path):
    p = tmp_path / "full.alg"
    p.write_text(FULL)
    return str(p)


def test_cli_file_driven_paths(full_file):
    code, out = run_cli(["verify", "hodge", full_file, "--name", "PKG"])
    assert code == 0
    code, out = run_cli(["verify", "cartan", full_file, "--name", "CC"])
    assert code == 0
    code, out = run_cli(["--max-weight", "3", "cocone", "lie", full_file,
                         "--name", "incL"])
    assert code == 0
    code, out = run_cli(["--max-weight", "3", "cocone", "explog", full_file,
                         "--name", "incA"])
    assert code == 0
    code, out = run_cli(["--max-weight", "3", "cocone", "derived", full_file,
                         "--name", "SP"])
    assert code == 0


def test_cli_mc_correspond_file_driven(tmp_path):
    text = FULL + """
element xx L1

element mm E
  id<-c t1 -> 1
"""
    # morphism target must contain the element space; use incL (End to End)
    p = tmp_path / "corr.alg"
    p.write_text(text.replace("element xx L1", "element xx E"))
    code, out = run_cli(["--artin", "1,3", "mc", "correspond", str(p),
                         "--morphism", "incL", "--x", "xx", "--m", "mm"])
    assert code in (0, 1)
    assert "memberships agree" in out
    assert code == 0  # both sides must agree on membership


def test_cli_period_lambda_example():
    code, out = run_cli(["--max-weight", "2", "period", "split",
                         "--example", "lambda:1"])
    assert code == 0


def test_shipped_demo_file_passes():
    import os
    demo = os.path.join(os.path.dirname(__file__), "..", "docs", "demo.alg")
    code, out = run_cli(["verify", "structure", demo, "--name", "S"])
    assert code == 0
    code, out = run_cli(["--artin", "1,3", "mc", "check", demo,
                         "--structure", "S", "--element", "xi"])
    assert code == 0
