import json
import subprocess
import sys

import pytest

from surfres.cli import bundled_corpus, main, run_corpus

UMBRELLA = str(bundled_corpus() / "whitney-umbrella-f2.job")
CONE = str(bundled_corpus() / "cubic-cone-f2.job")
DEEP = str(bundled_corpus() / "z2-x5y3-q.job")


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_resolve_writes_a_verifiable_trace(tmp_path, capsys):
    out = tmp_path / "t.json"
    assert main(["resolve", UMBRELLA, "--out", str(out)]) == 0
    assert "success" in capsys.readouterr().err
    assert main(["verify", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["outcome"]["status"] == "success"


def test_resolve_to_stdout(capsys):
    assert main(["resolve", UMBRELLA]) == 0
    assert json.loads(capsys.readouterr().out)["version"]


def test_budget_exit_code(tmp_path):
    assert main(["resolve", DEEP, "--max-depth", "1", "--out", str(tmp_path / "t.json")]) == 2
    assert main(["resolve", DEEP, "--trunc", "4", "--out", str(tmp_path / "u.json")]) == 2
    assert json.loads((tmp_path / "t.json").read_text())["outcome"]["status"] == "budget"


def test_parse_error_exit_code(tmp_path, capsys):
    bad = write(tmp_path, "bad.job", "[job]\nmode = resolve-3d\n[ring]\n[ideal]\ngenerators = z^2 + (x\n")
    assert main(["resolve", bad]) == 1
    assert "entry 1" in capsys.readouterr().err
    assert main(["resolve", str(tmp_path / "missing.job")]) == 1


def test_unsupported_and_extension(tmp_path):
    job = open(CONE).read().replace("allow_extension = true", "")
    plain = write(tmp_path, "cone.job", job)
    assert main(["resolve", plain, "--out", str(tmp_path / "a.json")]) == 3
    out = tmp_path / "b.json"
    assert main(["resolve", plain, "--allow-extension", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["outcome"]["extended_from"] == {"char": "2"}


def test_invariants_and_polygon(tmp_path, capsys):
    out = tmp_path / "inv.json"
    assert main(["invariants", UMBRELLA, "--out", str(out)]) == 0
    inv = json.loads(out.read_text())
    assert inv["nu"] == 2 and inv["tau"] == 1
    assert main(["polygon", str(bundled_corpus() / "z2-x5y3-q.job")]) == 0
    poly = json.loads(capsys.readouterr().out)
    assert poly["prepared"]["vertices"] == [["5/2", "3/2"]]


def test_verify_rejects_tampering(tmp_path, capsys):
    out = tmp_path / "t.json"
    main(["resolve", UMBRELLA, "--out", str(out)])
    data = json.loads(out.read_text())
    data["nodes"][1]["nu"] += 1
    out.write_text(json.dumps(data))
    capsys.readouterr()
    assert main(["verify", str(out)]) == 4
    assert "FAIL edge 1" in capsys.readouterr().err
    out.write_text("{}")
    assert main(["verify", str(out)]) == 1


def test_corpus_isolates_failures(tmp_path):
    write(tmp_path, "good.job", open(UMBRELLA).read())
    write(tmp_path, "bad.job", "[job]\n")
    write(tmp_path, "deep.job", open(DEEP).read().replace("max_depth = 40", "max_depth = 1"))
    summary = run_corpus(tmp_path, trace_dir=str(tmp_path / "traces"))
    rows = {r["file"]: r for r in summary["jobs"]}
    assert rows["good.job"]["ok"] and rows["good.job"]["verified"]
    assert rows["bad.job"]["exit_code"] == 1
    assert rows["deep.job"]["exit_code"] == 2
    assert sorted(summary["flagged"]) == ["bad.job", "deep.job"]
    assert (tmp_path / "traces" / "good.trace.json").exists()


def test_corpus_empty_directory(tmp_path, capsys):
    assert main(["corpus", str(tmp_path)]) == 0
    assert "0/0" in capsys.readouterr().err
    assert main(["corpus", str(tmp_path / "nope")]) == 1


def test_bundled_corpus_all_ok(tmp_path):
    out = tmp_path / "summary.json"
    assert main(["corpus", "--jobs", "4", "--out", str(out)]) == 0
    summary = json.loads(out.read_text())
    assert summary["total"] >= 30
    assert summary["ok"] == summary["total"], summary["flagged"]


@pytest.mark.parametrize("args", [["--help"], ["resolve", "--help"]])
def test_module_entry_point(args):
    res = subprocess.run([sys.executable, "-m", "surfres", *args], capture_output=True, text=True)
    assert res.returncode == 0 and "usage" in res.stdout
