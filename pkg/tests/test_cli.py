import json

import pytest

from memforge.cli import FAIL, OK, USAGE, main


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


def test_compile_then_validate(tmp_path, fixtures, capsys):
    target = tmp_path / "m.psys"
    code, _, _ = run(capsys, "compile-rm", fixtures / "M_ab.rm", "--mode", "traces", "-o", target)
    assert code == OK and target.exists()
    code, out, _ = run(capsys, "--json", "validate", target, "--ops", "a b c d d* g' g*")
    data = json.loads(out)
    assert code == OK and data["ok"] and data["lop"]["m"] == 2


def test_validate_reports_unlicensed_ops(tmp_path, fixtures, capsys):
    target = tmp_path / "g.psys"
    run(capsys, "compile-mg", fixtures / "G_ab.mg", "--mode", "lab", "-o", target)
    code, out, _ = run(capsys, "validate", target, "--ops", "a b")
    assert code == FAIL and "invalid" in out


def test_compile_to_stdout(fixtures, capsys):
    code, out, _ = run(capsys, "compile-mg", fixtures / "G_ab.mg", "--mode", "ext")
    assert code == OK and out.startswith("objects:") and "# gadget: MgInit" in out


def test_compile_warnings_go_to_stderr(tmp_path, capsys):
    src = tmp_path / "w.rm"
    src.write_text("registers: 2\noutput: 1\nstart: l0\nhalt: lh\nl0: WRITE 1 lh\nlh: HALT\n")
    code, out, err = run(capsys, "compile-rm", src, "--mode", "lab")
    assert code == OK and "warning:" in err and "renamed" in err


def test_traces_rejected_for_grammars(fixtures, capsys):
    code, _, err = run(capsys, "compile-mg", fixtures / "G_ab.mg", "--mode", "traces")
    assert code == USAGE and "error" in err


def test_explore_trap(fixtures, capsys):
    code, out, _ = run(capsys, "explore", fixtures / "trap.psys", "--mode", "lab", "--json")
    data = json.loads(out)
    assert code == OK and data["strings"] == [] and data["stats"]["cycles"] >= 1
    assert set(data) == {"mode", "strings", "complete_up_to", "truncated", "stats"}


def test_run_is_seeded(fixtures, capsys, tmp_path):
    target = tmp_path / "m.psys"
    run(capsys, "compile-rm", fixtures / "M_branch.rm", "--mode", "ext", "-o", target)
    _, a, _ = run(capsys, "run", target, "--mode", "ext", "--seed", 3, "--json")
    _, b, _ = run(capsys, "run", target, "--mode", "ext", "--seed", 3, "--json")
    assert a == b
    data = json.loads(a)
    assert data["halted"] and data["outputs"][0] in ("a", "bb")


def test_oracles(fixtures, capsys):
    code, out, _ = run(capsys, "oracle-rm", fixtures / "M_anbn.rm", "--max-len", 6, "--json")
    assert code == OK and json.loads(out)["strings"] == ["ab", "aabb", "aaabbb"]
    code, out, _ = run(capsys, "oracle-mg", fixtures / "G_ac.mg", "--max-len", 6)
    assert code == OK and 'strings: ["ab"]' in out


@pytest.mark.parametrize("src, mode", [("M_branch.rm", "traces"), ("G_ab.mg", "obj")])
def test_lang_eq(tmp_path, fixtures, capsys, src, mode):
    target = tmp_path / "x.psys"
    cmd = "compile-rm" if src.endswith(".rm") else "compile-mg"
    run(capsys, cmd, fixtures / src, "--mode", mode, "-o", target)
    code, out, _ = run(capsys, "lang-eq", target, "--mode", mode, "--against", fixtures / src, "--max-len", 6, "--json")
    data = json.loads(out)
    assert code == OK and data["equal"] and data["missing"] == data["extra"] == []


def test_lang_eq_failure(tmp_path, fixtures, capsys):
    target = tmp_path / "x.psys"
    run(capsys, "compile-rm", fixtures / "M_ab.rm", "--mode", "lab", "-o", target)
    code, out, _ = run(capsys, "lang-eq", target, "--mode", "lab", "--against", fixtures / "M_branch.rm", "--json")
    data = json.loads(out)
    assert code == FAIL and data["extra"] == ["ab"] and data["missing"] == ["a", "bb"]


def test_parse_error_location(tmp_path, capsys):
    bad = tmp_path / "bad.psys"
    bad.write_text("objects: a\nlabels:\nops: a\noutput:\ninit: [0 a]\nrules:\n[0 a -> zz]\n")
    code, _, err = run(capsys, "validate", bad)
    assert code == USAGE and err.startswith(f"{bad}:7:")


@pytest.mark.parametrize(
    "argv",
    [[], ["explore"], ["explore", "nope.psys", "--mode", "lab"], ["explore", "x", "--mode", "weird"]],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == USAGE


def test_thread_setting(monkeypatch, fixtures, capsys):
    monkeypatch.setenv("MEMFORGE_THREADS", "0")
    assert run(capsys, "oracle-rm", fixtures / "M_ab.rm")[0] == USAGE
    monkeypatch.setenv("MEMFORGE_THREADS", "4")
    assert run(capsys, "oracle-rm", fixtures / "M_ab.rm")[0] == OK
