import json
import subprocess
import sys

import pytest

from netmorph.cli import EXIT_INPUT, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main


@pytest.fixture(autouse=True)
def cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv("NETMORPH_CACHE_DIR", str(tmp_path / "cache"))


@pytest.fixture
def files(tmp_path):
    (tmp_path / "pa.gen").write_text("# preferential\n(indeg j)\n")
    (tmp_path / "c.gen").write_text("1\n")
    (tmp_path / "c7.gen").write_text("7\n")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_synth_arc_count(files, capsys):
    out = files / "pa.edges"
    code, _ = run(capsys, "synth", "--program", files / "pa.gen", "--vertices", 100, "--arcs", 1000, "--out", out)
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert len(lines) == 1000 and len(set(lines)) == 1000


def test_synth_deterministic_stdout(files, capsys):
    args = ("synth", "--program", files / "pa.gen", "--vertices", 30, "--arcs", 60, "--seed", 4)
    _, a = run(capsys, *args)
    _, b = run(capsys, *args)
    assert a.out == b.out and a.out.count("\n") == 60


def test_eval_self_is_zero(files, capsys):
    target = files / "t.edges"
    run(capsys, "synth", "--program", files / "pa.gen", "--vertices", 40, "--arcs", 150, "--out", target)
    code, res = run(capsys, "eval", "--network", target, "--target", target, "--ensemble-size", 5)
    assert code == EXIT_OK
    report = json.loads(res.out)
    assert report["fitness"] == 0.0 and len(report["ratios"]) == 7


def test_eval_program(files, capsys):
    target = files / "t.edges"
    run(capsys, "synth", "--program", files / "c.gen", "--vertices", 40, "--arcs", 150, "--out", target, "--undirected")
    code, res = run(capsys, "eval", "--program", files / "c.gen", "--target", target, "--ensemble-size", 5, "--undirected")
    assert code == EXIT_OK
    assert set(json.loads(res.out)["ratios"]) == {"k", "PR", "d_u", "tau"}


def test_compare_and_dump(files, capsys):
    a, b = files / "a.edges", files / "b.edges"
    run(capsys, "synth", "--program", files / "pa.gen", "--vertices", 30, "--arcs", 80, "--out", a)
    run(capsys, "synth", "--program", files / "c.gen", "--vertices", 30, "--arcs", 80, "--out", b)
    code, res = run(capsys, "compare", "--a", a, "--b", b, "--hist-dir", files / "h")
    assert code == EXIT_OK
    vector = json.loads(res.out)
    assert list(vector) == ["k_in", "k_out", "PR_d", "PR_r", "d_d", "d_u", "tau"]
    lines = (files / "h" / "a-d_d.txt").read_text().splitlines()
    assert all(len(line.split()) == 2 for line in lines)
    assert json.loads((files / "h" / "radar.json").read_text()) == vector


def test_baseline_caches(files, capsys, tmp_path):
    target = files / "t.edges"
    run(capsys, "synth", "--program", files / "c.gen", "--vertices", 30, "--arcs", 80, "--out", target)
    code, first = run(capsys, "baseline", "--target", target, "--count", 4)
    assert code == EXIT_OK
    assert len(list((tmp_path / "cache").glob("baseline-*.json"))) == 1
    _, second = run(capsys, "baseline", "--target", target, "--count", 4)
    assert json.loads(first.out) == json.loads(second.out)


def test_gensim(files, capsys):
    code, res = run(capsys, "gensim", "--a", files / "c.gen", "--b", files / "c7.gen", "--vertices", 30, "--arcs", 60)
    assert code == EXIT_OK
    d = json.loads(res.out)
    assert d["d"] == 0.0 and d["seeds"] == [0, 1]


def test_evolve_replay(files, capsys):
    target = files / "t.edges"
    run(capsys, "synth", "--program", files / "pa.gen", "--vertices", 25, "--arcs", 60, "--out", target)
    common = ("evolve", "--target", target, "--stable-gens", 5, "--max-gens", 15, "--ensemble-size", 3, "--seed", 8)
    assert run(capsys, *common, "--out-dir", files / "r1")[0] == EXIT_OK
    assert run(capsys, *common, "--out-dir", files / "r2", "--no-cache")[0] == EXIT_OK
    assert (files / "r1" / "history.csv").read_bytes() == (files / "r2" / "history.csv").read_bytes()
    # the synthetic network re-ingests
    code, _ = run(capsys, "compare", "--a", files / "r1" / "synthetic.edges", "--b", target)
    assert code == EXIT_OK


def test_exit_codes(files, capsys):
    assert run(capsys, "synth", "--vertices", 3)[0] == EXIT_USAGE
    assert run(capsys, "evolve", "--target", "x", "--out-dir", "y", "--tolerance", "-1")[0] == EXIT_USAGE
    code, res = run(capsys, "synth", "--program", files / "nope.gen", "--vertices", 3, "--arcs", 1)
    assert code == EXIT_INPUT and res.err.count("\n") == 1
    (files / "bad.gen").write_text("(+ 1")
    assert run(capsys, "synth", "--program", files / "bad.gen", "--vertices", 3, "--arcs", 1)[0] == EXIT_INPUT
    # directed-only variable in undirected mode
    (files / "dd.gen").write_text("dd")
    assert run(capsys, "synth", "--program", files / "dd.gen", "--vertices", 3, "--arcs", 1, "--undirected")[0] == EXIT_INPUT
    assert run(capsys, "synth", "--program", files / "c.gen", "--vertices", 3, "--arcs", 7)[0] == EXIT_RUNTIME
    assert main([]) == EXIT_USAGE
    assert main(["synth", "--vertices", "0", "--program", "p", "--arcs", "1"]) == EXIT_USAGE


def test_help_mentions_identifiers_and_tolerance():
    proc = subprocess.run([sys.executable, "-m", "netmorph", "evolve", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "first appearance" in proc.stdout and "0.15" in proc.stdout and "0.05" in proc.stdout
