import io
import json

import pytest

from lpplab import cli, store
from lpplab.montecarlo import curve_from_values


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_parse_examples():
    cmd = cli.parse_and_validate("tails --stat tf-local --r 256 --n 1024 --t 0.8:2.4:0.4 --trials 20000 --seed 7".split())
    assert cmd.params["t_grid"] == [0.8, 1.2, 1.6, 2.0, 2.4]
    assert cmd.params["trials"] == 20000 and cmd.params["seed"] == 7
    with pytest.raises(cli.UsageError, match="--n"):
        cli.parse_and_validate("tails --r 256 --n 100".split())
    cmd = cli.parse_and_validate("events --r 729 --t 2 --n 2187".split())
    assert cmd.params["u"] == [0, 486] and cmd.params["v"] == [243, 729]


def test_grid_parsing():
    assert cli.parse_grid("0:1:0.25") == [0, 0.25, 0.5, 0.75, 1.0]
    assert cli.parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert cli.parse_grid("1,2.5") == [1.0, 2.5]


@pytest.mark.parametrize("argv", ["events --r 729 --t 9 --n 2187", "tails --r 16 --n 32 --t 2:1:0.5",
                                  "frobnicate", "oracle --bogus 1", "exponents --n-grid 8,16"])
def test_usage_errors_exit_2(argv, capsys):
    code, out = run(argv.split(), capsys)
    assert code == 2 and out.err


def test_unwritable_output_exit_4(tmp_path, capsys):
    code, out = run(["oracle", "--trials", "3", "--out", str(tmp_path / "no" / "x.jsonl")], capsys)
    assert code == 4


def test_jsonl_byte_identical_across_threads(tmp_path):
    outs = []
    for threads in ("1", "8"):
        path = tmp_path / f"t{threads}.jsonl"
        assert cli.main(["tails", "--stat", "tf-global", "--n", "24", "--t", "0.5:2:0.5",
                         "--trials", "30", "--threads", threads, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    recs = store.read_jsonl(tmp_path / "t1.jsonl")
    assert [r["trial_index"] for r in recs[:-1]] == list(range(30))
    assert all(r["wall_time_ms"] is None for r in recs)
    assert recs[-1]["params"]["statistic"] == "tf_global"


def test_csv_agrees_with_jsonl(tmp_path):
    out = tmp_path / "c.jsonl"
    assert cli.main(["tails", "--r", "8", "--n", "24", "--trials", "40", "--format", "both",
                     "--out", str(out)]) == 0
    curve = store.read_jsonl(out)[-1]["payload"]["curve"]["rows"]
    rows = store.read_curve_csv(tmp_path / "c.csv")
    assert len(rows) == len(curve)
    for a, b in zip(rows, curve):
        assert a == b


def test_timing_flag(tmp_path):
    out = tmp_path / "t.jsonl"
    cli.main(["events", "--r", "27", "--t", "1", "--n", "27", "--trials", "2", "--timing", "--out", str(out)])
    recs = store.read_jsonl(out)
    assert all(r["wall_time_ms"] > 0 for r in recs[:-1])


def test_audit_and_verify_exit_0(capsys):
    code, out = run(["audit", "--r", "64", "--t", "1", "--n", "128", "--trials", "5"], capsys)
    assert code == 0
    last = json.loads(out.out.splitlines()[-1])
    assert last["payload"]["violating_trials"] == []
    code, out = run(["verify", "--trials", "40"], capsys)
    assert code == 0
    assert all(json.loads(out.out)["payload"]["invariants"].values())


def test_audit_violation_exit_3(monkeypatch, capsys):
    from lpplab import construction

    real = construction.implication_audit

    def broken(field, c):
        rep = real(field, c)
        rep.checks.append(construction.Check("planted", True, False))
        return rep

    monkeypatch.setattr("lpplab.montecarlo.implication_audit", broken)
    code, out = run(["audit", "--r", "27", "--t", "1", "--n", "27", "--trials", "3"], capsys)
    assert code == 3
    assert json.loads(out.out.splitlines()[-1])["payload"]["violating_trials"] == [0, 1, 2]


def test_store_roundtrip_and_schema(tmp_path):
    rec = store.make_record("x", {"a": 1}, {"v": 0.1 + 0.2, "inf": float("inf")}, 3)
    line = store.dumps(rec)
    assert list(json.loads(line)) == sorted(json.loads(line))
    assert json.loads(line)["payload"]["v"] == 0.1 + 0.2
    path = tmp_path / "r.jsonl"
    with open(path, "w") as fh:
        store.write_jsonl(fh, [rec])
    assert store.read_jsonl(path)[0]["payload"]["v"] == 0.1 + 0.2
    bad = dict(rec, schema_version="2.0")
    path.write_text(store.dumps(bad) + "\n")
    with pytest.raises(store.SchemaError):
        store.read_jsonl(path)


def test_csv_header():
    buf = io.StringIO()
    curve = curve_from_values("tf_local", [0.5, 1.5, 2.5], [1.0, 2.0])
    store.write_csv(buf, store.CURVE_HEADER, store.curve_rows(curve))
    assert buf.getvalue().splitlines()[0] == "t,successes,trials,p_hat,ci_low,ci_high"
