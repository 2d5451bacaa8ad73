"""Command-line behaviour and exit codes."""

import json
import subprocess
import sys

import pytest

from qesurf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_verify_construction(capsys):
    code, out, _ = run(capsys, "verify-construction")
    assert code == 0
    assert out.strip().endswith("PASS")
    assert "min_m: 6" in out


def test_verify_construction_json(capsys):
    code, out, _ = run(capsys, "verify-construction", "--json")
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert data["steps"][-1]["values"]["min_m"] == 6


def test_empty_script(capsys, tmp_path):
    path = write(tmp_path, "empty.json", {"format": "qesurf-script", "version": 1, "steps": []})
    code, out, _ = run(capsys, "verify-construction", "--script", path, "--json")
    assert code == 0
    assert json.loads(out) == {"passed": True, "steps": []}


def test_failing_script_exits_one(capsys, tmp_path):
    from qesurf.construction import default_script
    script = default_script()
    script["steps"][2]["args"]["d2"] = "x^2 + t^4"
    path = write(tmp_path, "mutated.json", script)
    code, out, _ = run(capsys, "verify-construction", "--script", path)
    assert code == 1
    assert "[ 3] check_p_closed" in out and out.strip().endswith("FAIL")


def test_script_relative_atlas_file(capsys, tmp_path):
    from qesurf.construction import default_script
    from importlib import resources
    (tmp_path / "base_atlas.json").write_text(
        resources.files("qesurf.data").joinpath("base_atlas.json").read_text())
    script = default_script()
    script["steps"] = script["steps"][:2]
    path = write(tmp_path, "s.json", script)
    code, _, _ = run(capsys, "verify-construction", "--script", path)
    assert code == 0


def test_bad_script_file(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "verify-construction", "--script", str(bad))
    assert code == 2 and "error" in err


@pytest.mark.parametrize("p,M", [(2, 6), (3, 5)])
def test_solve(capsys, p, M):
    code, out, _ = run(capsys, "solve", "--p", str(p), "--json")
    assert code == 0
    assert json.loads(out)["global_M"] == M


def test_solve_table(capsys):
    code, out, _ = run(capsys, "solve", "--p", "2")
    assert code == 0
    assert "global M = 6" in out
    for label in ("I", "II-1", "II-2", "III-1", "III-2", "III-3"):
        assert f"\n{label} " in out


def test_solve_without_exclusion(capsys):
    code, out, _ = run(capsys, "solve", "--p", "2", "--no-iii2-exclusion", "--json")
    data = json.loads(out)
    assert code == 0 and data["global_M"] == 6
    assert data["rules"] == {"iii2_exclusion": False}


def test_solve_cap_limited(capsys):
    code, out, err = run(capsys, "solve", "--p", "2", "--caps", "g=1,chit=1,fibers=1")
    assert code == 1
    assert "NOT certified" in out and "cap-limited" in err


def test_solve_bad_input(capsys):
    assert run(capsys, "solve", "--p", "5")[0] == 2
    assert run(capsys, "solve", "--p", "2", "--caps", "q=1")[0] == 2


def test_min_m(capsys, tmp_path):
    witness = write(tmp_path, "w.json", {"p": 2, "g": 1, "chi": 0, "t": 0,
                                         "fibers": [{"m": 2, "a": 1, "kind": "tame"}]})
    code, out, _ = run(capsys, "min-m", "--config", witness)
    assert (code, out.strip()) == (0, "6")
    iii1 = write(tmp_path, "c.json", {"p": 2, "g": 0, "chi": 1, "t": 2, "fibers": []})
    code, out, _ = run(capsys, "min-m", "--config", iii1)
    assert (code, out.strip()) == (0, "1")


def test_min_m_errors(capsys, tmp_path):
    bad_a = write(tmp_path, "b.json", {"p": 2, "g": 1, "chi": 0, "t": 1,
                                       "fibers": [{"m": 2, "a": 2, "kind": "wild"}]})
    assert run(capsys, "min-m", "--config", bad_a)[0] == 2
    flat = write(tmp_path, "n.json", {"p": 2, "g": 1, "chi": 0, "t": 0, "fibers": []})
    code, _, err = run(capsys, "min-m", "--config", flat)
    assert code == 1 and "Kodaira" in err
    assert run(capsys, "min-m", "--config", str(tmp_path / "missing.json"))[0] == 2


def test_usage_error(capsys):
    assert run(capsys, "bogus")[0] == 2


def test_console_entry_point_threads_do_not_change_output():
    outs = []
    for threads in ("1", "4"):
        env = {"WORKBENCH_THREADS": threads, "PATH": "/usr/bin:/bin"}
        res = subprocess.run([sys.executable, "-m", "qesurf.cli", "solve", "--p", "2", "--json"],
                             capture_output=True, text=True, env=env, check=True)
        outs.append(res.stdout)
    assert outs[0] == outs[1]
