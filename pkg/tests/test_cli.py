import json

import pytest

from dcellham.cli import build_parser, dispatch
from dcellham.topology import Params, build_graph, t


def run(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_edgelist(capsys):
    code, out, _ = run(capsys, "gen", "--n", "3", "--k", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "# dcell n=3 k=1 t=12"
    assert len(lines) == 1 + 18


def test_gen_dot_and_json(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "--n", "2", "--k", "1", "--format", "dot")
    assert code == 0 and out.startswith("graph dcell {")
    target = tmp_path / "g.json"
    code, out, _ = run(capsys, "gen", "--n", "2", "--k", "1",
                       "--format", "json", "--out", str(target))
    assert code == 0 and out == ""
    data = json.loads(target.read_text())
    assert data["t"] == 6


def test_hp_round_trip(capsys):
    code, out, _ = run(capsys, "hp", "--n", "3", "--k", "2",
                       "--u", "0", "--v", "155")
    assert code == 0
    data = json.loads(out)
    assert data["path"][0] == 0 and data["path"][-1] == 155
    assert sorted(data["path"]) == list(range(t(3, 2)))


def test_hp_refusal_exit_code(capsys):
    code, out, err = run(capsys, "hp", "--n", "2", "--k", "1",
                         "--u", "0", "--v", "3")
    assert code == 3
    payload = json.loads(err)
    assert payload["error"] == "unsupported"


def test_ft_subcommands(capsys, tmp_path):
    faults = tmp_path / "f.json"
    faults.write_text(json.dumps({"vertices": [5], "edges": []}))
    code, out, _ = run(capsys, "ft-hc", "--n", "4", "--k", "1",
                       "--faults", str(faults))
    assert code == 0
    data = json.loads(out)
    assert data["faults"] == 1
    assert len(data["cycle"]) == t(4, 1) - 1 and 5 not in data["cycle"]

    code, out, _ = run(capsys, "ft-hp", "--n", "4", "--k", "1",
                       "--faults", str(faults), "--u", "0", "--v", "19")
    assert code == 0
    data = json.loads(out)
    assert data["path"][0] == 0 and data["path"][-1] == 19

    # two vertex faults exceed the n+k-4 = 1 path bound
    faults.write_text(json.dumps({"vertices": [5, 6]}))
    code, _, err = run(capsys, "ft-hp", "--n", "4", "--k", "1",
                       "--faults", str(faults), "--u", "0", "--v", "19")
    assert code == 3
    assert json.loads(err)["error"] == "fault-bound"

    code, _, err = run(capsys, "ft-hc", "--n", "4", "--k", "1",
                       "--faults", str(tmp_path / "missing.json"))
    assert code == 3 and json.loads(err)["error"] == "io"


def test_oracle_certify(capsys):
    code, out, _ = run(capsys, "oracle", "certify")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4
    assert all(line.startswith("PASS ") for line in lines)


def test_oracle_hp_and_fault_check(capsys):
    code, out, _ = run(capsys, "oracle", "hp", "--n", "2", "--k", "1",
                       "--u", "0", "--v", "1")
    assert code == 0 and json.loads(out)["found"]
    code, out, _ = run(capsys, "oracle", "fault-check", "--n", "2", "--k", "1",
                       "--f", "1", "--mode", "hc")
    assert code == 1
    data = json.loads(out)
    assert not data["ok"] and data["counterexample"]


def test_partial_next_golden(capsys):
    code, out, _ = run(capsys, "partial", "next", "--shape", "3,3,2",
                       "--steps", "5")
    assert code == 0
    assert out.strip().splitlines() == ["0,0,0", "1,0,0", "0,1,0", "0,0,1",
                                        "0,1,1"]
    code, out, _ = run(capsys, "partial", "next", "--shape", "3,2", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["shape"] == [3, 2] and len(data["listed"]) == 6


def test_partial_check_and_hp(capsys):
    code, out, _ = run(capsys, "partial", "check", "--n", "4", "--k", "2",
                       "--d", "6", "--c", "5")
    assert code == 0
    data = json.loads(out)
    assert data["kc_connected"] and data["copy_connectivity"]["passed"]

    code, out, _ = run(capsys, "partial", "hp", "--n", "4", "--k", "2",
                       "--d", "6", "--c", "5", "--u", "0", "--v", "30")
    assert code == 0
    data = json.loads(out)
    assert data["path"][0] == 0 and data["path"][-1] == 30
    assert len(data["path"]) == 6 * t(4, 1)


def test_bcast(capsys):
    code, out, _ = run(capsys, "bcast", "--n", "2", "--k", "2",
                       "--scheme", "ham")
    assert code == 0
    data = json.loads(out)
    assert data["per_trial"][0]["messages"] == t(2, 2) - 1
    assert data["config"]["scheme"] == "ham"
    code, out, _ = run(capsys, "bcast", "--n", "2", "--k", "1",
                       "--scheme", "flood", "--p", "0.3", "--trials", "4",
                       "--seed", "9")
    assert code == 0
    data = json.loads(out)
    assert len(data["per_trial"]) == 4


def test_bench_table(capsys):
    code, out, _ = run(capsys, "bench", "--pairs", "2,2", "3,1")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert lines[0].split() == ["n", "k", "t_k", "calls", "calls/t_k",
                                "seconds"]
    code, out, _ = run(capsys, "bench")
    assert code == 0 and len(out.strip().splitlines()) == 1


def test_usage_errors_exit_two():
    parser = build_parser()
    with pytest.raises(SystemExit) as exc:
        parser.parse_args(["gen", "--n", "3"])  # missing --k
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        parser.parse_args([])
    assert exc.value.code == 2
