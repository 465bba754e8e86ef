import json

from click.testing import CliRunner

from insdel_lab.cli import main


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_sample_code_roundtrip():
    res = run("sample-code", "--n", "8", "--k", "2", "--q", "101", "--seed", "3")
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert len(payload["alpha"]) == 8
    assert len(set(payload["alpha"])) == 8
    again = run("sample-code", "--n", "8", "--k", "2", "--q", "101", "--seed", "3")
    assert json.loads(again.output) == payload


def test_sample_code_invalid_params_exit_two():
    res = run("sample-code", "--n", "8", "--k", "2", "--q", "6")
    assert res.exit_code == 2
    res = run("sample-code", "--n", "8", "--k", "9", "--q", "101")
    assert res.exit_code == 2


def test_encode_explicit_alpha():
    res = run("encode", "--n", "3", "--k", "2", "--q", "5",
              "--alpha", "0,1,3", "--coeffs", "1,2")
    assert res.exit_code == 0
    assert json.loads(res.output)["codeword"] == [1, 3, 2]


def test_lcs_command():
    res = run("lcs", "--a", "1,0,0,1,1,0", "--b", "1,1,0,1,1,0,0")
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["length"] == 5
    assert payload["edit_distance"] == 3


def test_chains_command_figure_example():
    res = run("chains", "--a", "3,4,6,7,8,9", "--b", "1,2,3,4,6,8")
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert [part["members"] for part in payload["parts"]] == [[1, 3, 5, 6], [2, 4]]


def test_chains_command_split():
    res = run("chains", "--a", ",".join(str(v) for v in range(2, 12)),
              "--b", ",".join(str(v) for v in range(1, 11)), "--eps0", "1/4")
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert sorted(len(p["members"]) for p in payload["parts"]) == [4, 4]


def test_certify_command_success_and_certificate():
    ok = run("certify", "--algorithm", "1", "--n", "4", "--k", "2", "--q", "101",
             "--a", "1,2,3", "--b", "2,3,4", "--alpha", "0,1,2,5", "--r", "1")
    assert ok.exit_code == 0
    assert json.loads(ok.output)["outcome"] == "success"
    bad = run("certify", "--algorithm", "1", "--n", "4", "--k", "2", "--q", "101",
              "--a", "1,2,3", "--b", "2,3,4", "--alpha", "0,1,2,3", "--r", "1")
    assert bad.exit_code == 1
    assert json.loads(bad.output)["indices"] == [4]


def test_certify_command_algorithm_two():
    res = run("certify", "--algorithm", "2", "--n", "30", "--k", "2", "--q", "10007",
              "--eps", "0.27", "--eps0", "1/3", "--r", "1", "--seed", "5")
    assert res.exit_code == 0
    assert json.loads(res.output)["outcome"] == "success"


def test_verify_command():
    res = run("verify", "--n", "8", "--k", "2", "--q", "10007", "--ell", "5",
              "--seed", "1")
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["rank_verdict"] is True
    res = run("verify", "--n", "6", "--k", "2", "--q", "31", "--ell", "4",
              "--seed", "1", "--brute")
    assert res.exit_code in (0, 1)
    assert "brute_verdict" in json.loads(res.output)


def test_montecarlo_jsonl_stdout_and_determinism(tmp_path):
    args = ("montecarlo", "--mode", "rank", "--n", "12", "--k", "2", "--q", "4099",
            "--eps", "0.5", "--trials", "25", "--seed", "7")
    first = run(*args)
    second = run(*args)
    assert first.exit_code == 0
    assert first.output == second.output
    lines = first.output.strip().split("\n")
    assert len(lines) == 26
    summary = json.loads(lines[-1])
    assert set(summary) == {"trials", "failures", "freq", "ci95", "bound", "vacuous"}
    record = json.loads(lines[0])
    assert set(record) == {"trial", "seed", "mode", "outcome", "witness", "nanos"}
    assert record["nanos"] == 0  # timing is opt-in


def test_montecarlo_csv_output(tmp_path):
    out = tmp_path / "run.csv"
    res = run("montecarlo", "--mode", "zeropoly", "--q", "101", "--trials", "50",
              "--seed", "2", "--format", "csv", "--out", str(out))
    assert res.exit_code == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0].startswith("record,trial,seed,mode,outcome,witness,nanos,")
    assert len(lines) == 52  # header + 50 trials + summary
    assert lines[-1].startswith("summary,")


def test_montecarlo_timing_flag():
    res = run("montecarlo", "--mode", "rank", "--n", "12", "--k", "2", "--q", "4099",
              "--eps", "0.5", "--trials", "3", "--seed", "7", "--timing")
    assert res.exit_code == 0
    records = [json.loads(line) for line in res.output.strip().split("\n")[:-1]]
    assert any(rec["nanos"] > 0 for rec in records)


def test_montecarlo_bad_mode_exit_two():
    res = run("montecarlo", "--mode", "rank", "--n", "12", "--k", "2", "--q", "10",
              "--eps", "0.5", "--trials", "5")
    assert res.exit_code == 2


def test_theorem_command(tmp_path):
    out = tmp_path / "theorem.jsonl"
    res = run("theorem", "--which", "m1", "--n", "8", "--k", "2", "--q", "10007",
              "--eps", "0.5", "--trials", "5", "--seed", "2", "--out", str(out))
    assert res.exit_code == 0
    lines = out.read_text().strip().split("\n")
    assert len(lines) == 6
    assert json.loads(lines[0])["mode"] == "theorem-m1"
    assert "threshold_ok=False" in res.stderr


def test_bound_command_variants():
    res = run("bound", "--which", "quadratic", "--n", "12", "--k", "2",
              "--q", "4099", "--eps", "0.5")
    assert res.exit_code == 0
    payload = json.loads(res.output)
    assert payload["exact"] == "27/133432831"
    res = run("bound", "--which", "linear", "--n", "100", "--k", "2", "--q", "1000",
              "--eps0", "1/4", "--r", "5")
    assert json.loads(res.output)["vacuous"] is False
    res = run("bound", "--which", "sz", "--n", "1", "--degree", "2", "--tsize", "101")
    assert json.loads(res.output)["exact"] == "2/101"
    res = run("bound", "--which", "count", "--k", "2", "--r", "2")
    assert json.loads(res.output) == {"exact": 6, "bound": 16}
    res = run("bound", "--which", "count", "--k", "2")
    assert res.exit_code == 2
