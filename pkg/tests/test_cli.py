import csv
import io
import json
import math

import pytest

from sausage import cli
from sausage.ramanujan import n_direct
from sausage.specfun import EULER_GAMMA as G, KAPPA


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def jl(text):
    return [json.loads(line) for line in text.splitlines()]


def test_eval_n_zero(capsys):
    code, out, _ = run(capsys, "eval-n", "--lambda", "0")
    assert code == 0 and jl(out)[0]["values"]["value"] == 1.0


def test_eval_n_all_methods_agree(capsys):
    code, out, _ = run(capsys, "eval-n", "--alpha", repr(KAPPA), "--t", "1e6", "--method", "all")
    rows = jl(out)
    assert code == 0 and [r["params"]["method"] for r in rows] == ["direct", "bouwkamp", "expansion"]
    ref = n_direct(KAPPA * 1e6)
    for r in rows:
        bound = sum(r["error_estimates"].values()) + 1e-14
        assert abs(r["values"]["value"] - ref) <= bound


@pytest.mark.parametrize(
    "argv,flag",
    [
        (["eval-n", "--lambda", "-1"], "--lambda"),
        (["eval-n", "--alpha", "1"], "--alpha/--t"),
        (["eval-n", "--lambda", "1", "--t", "2"], "--lambda"),
        (["coeffs", "--n-max", "31"], "--n-max"),
        (["rate", "--t", "-1"], "--t"),
        (["hitting", "--rho", "0.5", "--t", "1"], "--rho"),
        (["simulate", "--threads", "0"], "--threads"),
    ],
)
def test_usage_errors(capsys, argv, flag):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and flag in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["coeffs", "--kind", "c"])
    assert e.value.code == 2


def test_coeffs_and_format_parity(capsys):
    _, out, _ = run(capsys, "coeffs", "--alpha", "1", "--n-max", "3", "--kind", "a")
    vals = [r["values"]["coefficient"] for r in jl(out)]
    assert vals[:2] == [1.0, pytest.approx(-G, rel=1e-15)]
    _, out_b, _ = run(capsys, "coeffs", "--n-max", "1", "--kind", "b")
    assert [r["values"]["coefficient"] for r in jl(out_b)] == [1.0, pytest.approx(1 - G, rel=1e-15)]
    _, csv_out, _ = run(capsys, "coeffs", "--alpha", "1", "--n-max", "3", "--kind", "a", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(csv_out)))
    assert [float(r["values.coefficient"]) for r in rows] == vals
    # the JSON text and the CSV cell carry the same digits
    assert json.loads(out.splitlines()[2])["values"]["coefficient"] == float(rows[2]["values.coefficient"])
    assert rows[2]["values.coefficient"] in out.splitlines()[2]


def test_serialisation_round_trips():
    rec = cli.OutputRecord("x", {"b": 1, "a": 0.1}, {"v": 1 / 3, "n": math.nan})
    buf = io.StringIO()
    cli.write_records([rec], "json", buf)
    line = buf.getvalue().strip()
    d = json.loads(line)
    assert d["values"]["v"] == 1 / 3 and d["values"]["n"] is None
    assert list(d) == sorted(d) and list(d["params"]) == ["a", "b"]


def test_rate_grid(capsys):
    code, out, _ = run(capsys, "rate", "--t-grid", "1e-3:1e3:13")
    rates = [r["values"]["rate"] for r in jl(out)]
    assert code == 0 and len(rates) == 13
    assert all(a > b for a, b in zip(rates, rates[1:]))


def test_rate_r_scaling(capsys):
    _, a, _ = run(capsys, "rate", "--t", "4", "--r", "2")
    _, b, _ = run(capsys, "rate", "--t", "1")
    assert jl(a)[0]["values"]["rate"] == jl(b)[0]["values"]["rate"]


def test_empty_grid(capsys):
    code, out, _ = run(capsys, "rate", "--t")
    assert code == 0 and out == ""
    code, out, _ = run(capsys, "area", "--format", "csv")
    assert code == 0 and out == ""


def test_area_and_bridge_theory(capsys):
    _, out, _ = run(capsys, "area", "--t", "100")
    assert jl(out)[0]["values"]["area"] == pytest.approx(159.2207670329833, rel=1e-10)
    _, out, _ = run(capsys, "bridge-theory", "--t", "100", "2")
    rows = jl(out)
    assert rows[0]["values"]["value"] == pytest.approx(2 * math.pi * 100 * n_direct(KAPPA * 100), rel=1e-14)
    assert "error" in rows[1]["params"]["status"]  # t = 2 is below the validity range of the formula


def test_hitting_rows(capsys):
    _, out, _ = run(capsys, "hitting", "--rho", "3", "100", "--t", "2", "1e4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 4
    assert float(rows[0]["values.q_exact"]) == pytest.approx(0.0634641136564803, rel=1e-10)
    assert {r["params.regime"] for r in rows} <= {"bulk", "far", "none"}


def test_simulate(capsys, monkeypatch):
    argv = ["simulate", "--mode", "bridge", "--t", "10", "--n-paths", "6", "--n-steps", "500", "--seed", "9"]
    code, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv, "--threads", "3")
    assert code == 0 and a == b
    rec = jl(a)[0]
    assert rec["seed"] == 9
    assert rec["values"]["theory"] == pytest.approx(2 * math.pi * 10 * n_direct(KAPPA * 10), rel=1e-14)
    monkeypatch.setenv("SAUSAGE_THREADS", "2")
    _, c, _ = run(capsys, *argv)
    assert c == a
    code, out, err = run(capsys, "simulate", "--n-paths", "10", "--n-steps", "100", "--budget", "50")
    assert code == 3 and out == "" and "budget" in err


def test_simulate_hitting(capsys):
    _, out, _ = run(capsys, "simulate", "--mode", "hitting", "--x", "3", "0", "--t", "2", "--n-paths", "200", "--n-steps", "200")
    rec = jl(out)[0]
    assert rec["values"]["theory"] == pytest.approx(0.0945219083963137, rel=1e-9)


def test_output_file(capsys, tmp_path):
    path = tmp_path / "o.jsonl"
    code, out, _ = run(capsys, "coeffs", "--n-max", "2", "-o", str(path))
    assert code == 0 and out == "" and len(path.read_text().splitlines()) == 6


def test_verify_quick(capsys):
    code, out, err = run(capsys, "verify", "--suite", "quick")
    rows = jl(out)
    ids = [r["params"]["criterion"] for r in rows]
    assert ids == sorted(set(ids)) and len(ids) == 10
    failed = {r["params"]["criterion"] for r in rows if not r["params"]["passed"]}
    assert code == (1 if failed else 0)
    assert err.count("criterion") == 10
