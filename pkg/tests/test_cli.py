import csv
import json

import pytest

from jpac.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, main


def test_gen_then_solve(tmp_path, capsys):
    inst = tmp_path / "net.json"
    assert main(["gen", "--k", "5", "--seed", "4", "--out", str(inst)]) == EXIT_OK
    for algo in ("nlpd", "pnmd", "oracle"):
        out = tmp_path / f"{algo}.json"
        assert main(["solve", str(inst), "--algo", algo, "--out", str(out)]) == EXIT_OK
        doc = json.loads(out.read_text())
        assert doc["K"] == 5 and all(1 <= k <= 5 for k in doc["supported"])
    assert main(["solve", str(inst), "--trace", "--alpha2-mode", "value:0.5"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert "iterations" in doc and "removal_trace" in doc


def test_bench_and_byte_identity(tmp_path):
    outs = []
    for name in ("x", "y"):
        out = tmp_path / f"{name}.csv"
        args = ["bench", "--seed", "42", "--k-list", "3,4", "--trials", "2", "--algos", "nlpd,pnmd,oracle",
                "--out", str(out), "--no-timing"]
        assert main(args) == EXIT_OK
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    rows = list(csv.DictReader(open(tmp_path / "x.csv")))
    assert len(rows) == 2 * 2 * 3 and rows[0]["wall_time_s"] == ""
    assert (tmp_path / "x_summary.csv").exists()


def test_bench_empty_k_list(tmp_path):
    assert main(["bench", "--k-list", "", "--out", str(tmp_path / "e.csv")]) == EXIT_OK


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["solve", "x.json", "--alpha2-mode", "bogus"])
    assert exc.value.code == EXIT_USAGE
    assert main(["bench", "--k-list", "20", "--algos", "oracle", "--out", str(tmp_path / "o.csv")]) == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text('{"K": 2}')
    assert main(["solve", str(bad)]) == EXIT_USAGE
    assert main(["solve", "--p", "1.5", str(bad)]) == EXIT_USAGE


def test_io_error(tmp_path):
    assert main(["solve", str(tmp_path / "missing.json")]) == EXIT_IO
    assert main(["gen", "--k", "3", "--out", str(tmp_path / "no" / "dir.json")]) == EXIT_IO


def test_verify_quick(capsys):
    assert main(["verify", "--quick"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)
