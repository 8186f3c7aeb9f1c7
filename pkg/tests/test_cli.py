from pathlib import Path

import pytest
from click.testing import CliRunner

from spherical_an import textio
from spherical_an.cli import main

A5 = str(Path(__file__).parent / "data" / "a5.txt")


@pytest.fixture
def run():
    runner = CliRunner()

    def go(*args, env=None, input=None):
        return runner.invoke(main, list(args), env=env, input=input)

    return go


def test_spherical_a5(run):
    r = run("spherical", "--in", A5)
    assert r.exit_code == 0, r.output
    lines = r.output.splitlines()
    assert lines[0] == "# spherical-an report 1 spherical"
    assert "verdict: spherical" in r.output and "dim ker d2^{0,0}: 1" in r.output


def test_spherical_rejects_sum(run):
    r = run("spherical", "--n", "2", "--sheaf", "1 1 0", "--sheaf", "1 1 0")
    assert r.exit_code == 0  # each --sheaf is judged separately
    r = run("spherical", "--in", "-", input=textio.dump("object", 1, ["H 0: 1 1 0 | 1 1 0"]))
    assert r.exit_code == 4 and "not spherical" in r.output


def test_twist_two_term_image(run, tmp_path):
    out = tmp_path / "img.txt"
    r = run("twist", "--n", "2", "--word", "T(1,-2)", "--sheaf", "1 2 0 0", "--out", str(out))
    assert r.exit_code == 0, r.output
    d = textio.load(out.read_text())
    assert [str(x) for x in d.H(-1)] == ["O_C1(-3)"] and len(d.H(0)) == 1
    assert d.H(0)[0].degrees == (-2, 1)


def test_env_default_n(run):
    r = run("twist", "--word", "T(1,0)", "--sheaf", "1 1 0", env={"SPHERICAL_AN_N": "1"})
    assert r.exit_code == 0, r.output


def test_reduce_writes_replayable_trace(run, tmp_path):
    out = tmp_path / "trace.txt"
    r = run("reduce", "--in", A5, "--out", str(out))
    assert r.exit_code == 0, r.output
    docs = textio.split_documents(out.read_text())
    n, word, steps = textio.load_trace(docs[0])
    assert n == 5 and steps[0][0] == "T(2,-2) T(1,-1)"
    assert textio.load(docs[1]).l_value() == 1


def test_reduce_pair_and_factor(run):
    r = run("reduce-pair", "--n", "2", "--word", "T(1,-1) T'(2,0)")
    assert r.exit_code == 0, r.output
    r = run("factor", "--n", "2", "--word", "L(0,1) T(2,-1) T(1,-1) L(0,1) T(2,-1) T(1,-1) L(0,1) T(2,-1) T(1,-1)")
    assert r.exit_code == 0, r.output
    for line in ("B-word: (empty)", "line bundle: 0 0", "flip: no", "shift: 0", "certified: yes"):
        assert line in r.output.splitlines()


def test_relations(run):
    r = run("relations", "--n", "3")
    assert r.exit_code == 0, r.output
    r = run("relations", "--n", "1", "--word", "T(1,-1)", "--word2", "T(1,0)")
    assert r.exit_code == 4
    r = run("relations", "--n", "1", "--word", "T(1,-1)", "--word2", "T(1,0)", "--level", "K")
    assert r.exit_code == 4


def test_fuzz_is_reproducible(run):
    a = run("fuzz", "--n", "2", "--cases", "3", "--seed", "7", "--max-l", "10")
    b = run("fuzz", "--n", "2", "--cases", "3", "--seed", "7", "--max-l", "10")
    assert a.exit_code == 0, a.output
    strip = lambda out: [ln.split("]", 1)[-1] for ln in out.splitlines()]
    assert strip(a.output) == strip(b.output) and "3/3 passed" in a.output


@pytest.mark.parametrize("args,code", [
    (("twist", "--n", "2", "--word", "T(1,", "--sheaf", "1 1 0"), 2),
    (("twist", "--n", "2", "--word", "T(1,0)", "--sheaf", "1 3 0 0 0"), 2),
    (("spherical", "--n", "2"), 2),
    (("reduce", "--n", "2", "--sheaf", "1 1 0", "--sheaf", "1 1 0", "--check"), 0),
    (("reduce-pair", "--n", "1", "--word", ""), 0),
])
def test_exit_codes(run, args, code):
    assert run(*args).exit_code == code


def test_engine_error_exit(run):
    doc = textio.dump("object", 1, ["H 0: 1 1 0 | 1 1 0"])
    r = run("reduce", "--in", "-", "--check", input=doc)
    assert r.exit_code == 3 and "NotSpherical" in r.output


def test_decompose_and_ext_table(run, tmp_path):
    import random

    from spherical_an import linked_sheaves as ls
    from spherical_an.chain_core import SubchainLineBundle as S

    e = ls.random_node_conjugate(ls.sum_of(2, [S.curve(1, 0), S.on(1, 2, 0, 0)]), random.Random(1))
    f = tmp_path / "e.txt"
    f.write_text(textio.dump_linked(e))
    r = run("decompose", "--in", str(f))
    assert r.exit_code == 0, r.output
    assert "O_C1(0)" in r.output and "O_C1..C2(0,0)" in r.output
    r = run("ext-table", "--n", "2", "--bound", "0", "--check-model")
    assert r.exit_code == 0, r.output
