import io
import json

import pytest

from gctree import eval_slp, eval_tslp, parse_slp, parse_tslp
from gctree.cli import detect_kind, main
from oracles import DATA

EX1 = str(DATA / "example1.tslp")
EX2 = str(DATA / "example2.slp")
EX3 = str(DATA / "example3.tslp")
EX4 = str(DATA / "example4.tslp")


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_examples(capsys):
    code, out, _ = run(capsys, "validate", EX1, EX2)
    assert code == 0
    assert "TSLP, size 12, tree size 7" in out
    assert "SLP, size 10, |val(S)| = 15" in out


def test_validate_empty_file(capsys, tmp_path):
    p = tmp_path / "empty.tslp"
    p.write_text("")
    code, out, err = run(capsys, "validate", str(p))
    assert code == 1 and "error" in out + err


def test_validate_syntax_error(capsys, tmp_path):
    p = tmp_path / "bad.tslp"
    p.write_text("S -> f(a,\n")
    assert run(capsys, "validate", str(p))[0] == 1


def test_validate_json_and_jobs(capsys):
    code, out, _ = run(capsys, "validate", EX1, EX3, EX4, "--json", "--jobs", "3")
    assert code == 0
    reports = json.loads(out)
    assert [r["size"] for r in reports][0] == 12
    assert all(r["ok"] for r in reports)


def test_stats(capsys):
    code, out, _ = run(capsys, "stats", EX3)
    assert code == 0 and "tree_size: 19" in out and "spine_rules: 6" in out


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "validate", str(tmp_path / "nope"))[0] == 1


def test_decompress_example1(capsys):
    code, out, _ = run(capsys, "decompress", EX1)
    assert code == 0 and out.strip() == "b(b(a,a),b(a,a))"


def test_decompress_single_node(capsys, tmp_path):
    p = tmp_path / "one.tslp"
    p.write_text("S -> a\n")
    assert run(capsys, "decompress", str(p))[1].strip() == "a"


def test_decompress_guard(capsys, tmp_path):
    p = tmp_path / "chain.tslp"
    assert main(["gen", "--mode", "chain", "-k", "40"]) == 0
    p.write_text(capsys.readouterr()[0])
    code, _, err = run(capsys, "decompress", str(p))
    assert code == 2
    assert str(2**40 + 1) in err


def test_decompress_env_guard(capsys, monkeypatch):
    monkeypatch.setenv("GCT_MAX_NODES", "5")
    code, _, err = run(capsys, "decompress", EX1)
    assert code == 2 and "size 7" in err
    monkeypatch.setenv("GCT_MAX_NODES", "7")
    assert run(capsys, "decompress", EX1)[0] == 0
    monkeypatch.setenv("GCT_MAX_NODES", "many")
    assert run(capsys, "decompress", EX1)[0] == 1


def test_decompress_flag_guard(capsys):
    assert run(capsys, "decompress", EX1, "--max-nodes", "6")[0] == 2


def test_normalize_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "normalize", EX3)
    assert code == 0
    g = parse_tslp(out)
    assert eval_tslp(g) == eval_tslp(parse_tslp((DATA / "example3.tslp").read_text()))


def test_nav_example3(capsys, monkeypatch):
    code, out, _ = run(
        capsys, "nav", EX3, stdin="root / child 2 / child 2 / label", monkeypatch=monkeypatch
    )
    assert code == 0 and out.split() == ["ok", "ok", "ok", "g"]
    code, out, _ = run(capsys, "nav", EX3, stdin="root / parent", monkeypatch=monkeypatch)
    assert out.split() == ["ok", "undefined"]


def test_nav_cursor_and_errors(capsys, monkeypatch):
    script = "root\nchild 2\nchild 2\ncursor\nfoo\nchild x\neq a b\n"
    code, out, _ = run(capsys, "nav", EX3, stdin=script, monkeypatch=monkeypatch)
    lines = out.splitlines()
    assert code == 0 and len(lines) == 7
    assert lines[3] == "(S,l,A) (A,r,D) (D,2,F) (F,l,J)"
    assert all(line.startswith("error:") for line in lines[4:])


def test_nav_eq_boxed_node(capsys, monkeypatch):
    script = "root\nchild 1\nchild 2\nmark a\nroot\nchild 2\nmark b\neq a b\nlabel"
    code, out, _ = run(capsys, "nav", EX4, "--eq", stdin=script, monkeypatch=monkeypatch)
    assert code == 0
    assert out.split()[-2:] == ["true", "f"]


def test_nav_script_file(capsys, tmp_path):
    s = tmp_path / "script.txt"
    s.write_text("root; rank; child 1; label")
    assert run(capsys, "nav", EX3, "--script", str(s))[1].split() == ["ok", "2", "ok", "g"]


def test_eq_command(capsys):
    assert run(capsys, "eq", EX4, "1 2", "2")[1].strip() == "equal"
    assert run(capsys, "eq", EX4, "1", "2")[1].strip() == "not-equal"
    code, out, _ = run(capsys, "eq", EX4, "--stats")
    assert code == 0 and "reduced: yes" in out
    assert "S: s=3 S'=E r=f(A,x1)" in out
    assert run(capsys, "eq", EX4, "9", "1")[0] == 1


def test_slp_queries(capsys):
    assert run(capsys, "slp", "at", EX2, "3")[1].strip() == "b"
    assert run(capsys, "slp", "at", EX2, "16")[0] == 1
    assert run(capsys, "slp", "slice", EX2, "1", "3", "--expand")[1].strip() == "aab"
    assert run(capsys, "slp", "lcp", EX2, "--symbol", "B", "--y", "A")[1].strip() == "6"
    assert run(capsys, "slp", "walk", EX2)[1].strip() == "aabaabaabaabaab"
    assert run(capsys, "slp", "walk", EX2, "--reverse", "--limit", "3")[1].strip() == "baa"


def test_slp_slice_is_grammar(capsys):
    code, out, _ = run(capsys, "slp", "slice", EX2, "2", "9")
    g = parse_slp(out)
    assert "".join(eval_slp(g, g.start)) == "aabaabaabaabaab"[1:9]


def test_encode(capsys, monkeypatch):
    _, out, _ = run(
        capsys, "encode", "--mode", "fcns", stdin="a(b,c,d)", monkeypatch=monkeypatch
    )
    assert out.strip() == "a(b(nil,c(nil,d(nil,nil))),nil)"
    _, out, _ = run(
        capsys, "encode", "--mode", "bin", stdin="f(a,b,c,d,e)", monkeypatch=monkeypatch
    )
    assert out.strip() == "f(_g3(_g2(a,b),c),_g2(d,e))"
    _, out, _ = run(
        capsys, "encode", "--mode", "bin", "--decode", stdin=out, monkeypatch=monkeypatch
    )
    assert out.strip() == "f(a,b,c,d,e)"


def test_gen_deterministic(capsys):
    for mode in ["chain", "balanced", "random", "general", "slp"]:
        _, first, _ = run(capsys, "gen", "--mode", mode, "-k", "6", "--seed", "3")
        _, second, _ = run(capsys, "gen", "--mode", mode, "-k", "6", "--seed", "3")
        assert first == second and first


def test_gen_chain_size(capsys, tmp_path):
    _, out, _ = run(capsys, "gen", "--mode", "chain", "-k", "8")
    p = tmp_path / "c.tslp"
    p.write_text(out)
    _, out, _ = run(capsys, "validate", str(p), "--json")
    size = json.loads(out)["tree_size"]
    assert 2**8 <= size <= 2**9


def test_bench_dfs_example3(capsys):
    code, out, _ = run(capsys, "bench", EX3, "--walk", "dfs", "--json")
    rep = json.loads(out)
    assert code == 0
    assert rep["edges"] == 2 * (19 - 1)
    assert rep["stack_ops_max"] <= 8 and rep["links_max"] <= 1


def test_bench_zero_steps(capsys):
    _, out, _ = run(capsys, "bench", EX3, "--steps", "0", "--json")
    rep = json.loads(out)
    assert rep["steps"] == 0
    assert all(rep[k] == 0 for k in rep if k.endswith(("_mean", "_max")))


def test_bench_modes_deterministic(capsys):
    args = ["bench", EX4, "--steps", "500", "--seed", "4", "--json"]
    for extra in [[], ["--eq"], ["--string"]]:
        _, a, _ = run(capsys, *args, *extra)
        _, b, _ = run(capsys, *args, *extra)
        ra, rb = json.loads(a), json.loads(b)
        ra.pop("wall_s"), rb.pop("wall_s")
        assert ra == rb
    assert json.loads(run(capsys, *args, "--eq")[1])["lcas_max"] <= 1


def test_tries(capsys):
    code, out, _ = run(capsys, "tries", EX2)
    assert code == 0
    assert "L(S) = SABCa" in out and "R(B) = BCDb" in out
    assert "digraph" in run(capsys, "tries", EX2, "--dot")[1]


def test_kind_detection():
    assert detect_kind("S -> a b c\n") == "slp"
    assert detect_kind("S -> f(a,b)\n") == "tslp"
    assert detect_kind("S -> A\nA -> a\n") == "tslp"


def test_kind_override(capsys, tmp_path):
    p = tmp_path / "x.txt"
    p.write_text("S -> A\nA -> a\n")
    code, out, _ = run(capsys, "validate", str(p), "--kind", "slp")
    assert code == 0 and "SLP" in out


def test_no_subcommand(capsys):
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code != 0
