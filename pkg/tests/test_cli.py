import json

import numpy as np
import pytest

from chainuq.cli import main


@pytest.fixture
def chain_file(tmp_path):
    path = tmp_path / "chain.txt"
    path.write_text("A\nA\nB\nA\nB\nB\nA\nA\nB\nA\n" * 5, encoding="utf-8")
    return path


def run_json(capsys, args):
    code = main(args + ["--out-format", "json"])
    out = capsys.readouterr().out
    assert code == 0
    return json.loads(out)


def test_analyze_text_output(chain_file, capsys):
    code = main(["analyze", "--input", str(chain_file), "--seed", "3", "--draws", "400"])
    captured = capsys.readouterr()
    assert code == 0
    assert "effective sample size" in captured.out
    assert "A" in captured.out and "B" in captured.out


def test_analyze_json_is_reproducible(chain_file, capsys):
    args = ["analyze", "--input", str(chain_file), "--seed", "5", "--draws", "300"]
    first = run_json(capsys, args)
    second = run_json(capsys, args)
    assert first == second
    assert first["config"]["seed"] == 5
    assert first["chain"]["models_observed"] == 2
    means = [row["mean"] for row in first["models"]]
    assert abs(sum(means) - 1.0) < 1e-9


def test_two_identical_files_equal_one_file_twice(tmp_path, chain_file, capsys):
    copy = tmp_path / "copy.txt"
    copy.write_text(chain_file.read_text(encoding="utf-8"), encoding="utf-8")
    base = ["--seed", "2", "--draws", "200"]
    twice = run_json(capsys, ["analyze", "--input", str(chain_file), "--input", str(chain_file)] + base)
    copied = run_json(capsys, ["analyze", "--input", str(chain_file), "--input", str(copy)] + base)
    twice["config"]["inputs"] = copied["config"]["inputs"] = None
    assert twice == copied


def test_analyze_csv_input_with_chain_ids(tmp_path, capsys):
    path = tmp_path / "chains.csv"
    rows = ["chain_id,iteration,label"]
    rows += [f"c1,{i},{'A' if i % 3 else 'B'}" for i in range(1, 31)]
    rows += [f"c2,{i},{'B' if i % 4 else 'A'}" for i in range(1, 21)]
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    report = run_json(capsys, ["analyze", "--input", str(path), "--seed", "1", "--draws", "200"])
    assert report["chain"]["chains"] == 2
    assert report["chain"]["iterations"] == 50
    assert report["chain"]["transitions"] == 48


def test_missing_input_exits_1(capsys):
    assert main(["analyze", "--input", "/nonexistent/chain.txt"]) == 1
    assert "input error" in capsys.readouterr().err


def test_empty_input_exits_1(tmp_path, capsys):
    path = tmp_path / "empty.txt"
    path.write_text("", encoding="utf-8")
    assert main(["analyze", "--input", str(path)]) == 1


def test_bad_epsilon_exits_3(chain_file, capsys):
    assert main(["analyze", "--input", str(chain_file), "--epsilon", "nonsense"]) == 3
    assert "config error" in capsys.readouterr().err


def test_bad_ci_exits_3(chain_file):
    assert main(["analyze", "--input", str(chain_file), "--ci", "0.9,0.1"]) == 3


def test_bad_draws_exits_3(chain_file):
    assert main(["analyze", "--input", str(chain_file), "--draws", "0"]) == 3


def test_unknown_flag_exits_3(chain_file):
    assert main(["analyze", "--input", str(chain_file), "--bogus"]) == 3


def test_unknown_bf_label_exits_3(chain_file, capsys):
    assert main(["analyze", "--input", str(chain_file), "--bf", "A,Z"]) == 3


def test_degenerate_row_exits_2(tmp_path, capsys):
    path = tmp_path / "chain.txt"
    path.write_text("A\nA\nB\n", encoding="utf-8")
    code = main(["analyze", "--input", str(path), "--epsilon", "fixed:0"])
    assert code == 2
    assert "numerical failure" in capsys.readouterr().err


def test_single_model_chain_report(tmp_path, capsys):
    path = tmp_path / "chain.txt"
    path.write_text("M\nM\nM\nM\n", encoding="utf-8")
    report = run_json(capsys, ["analyze", "--input", str(path), "--seed", "0", "--draws", "50"])
    (row,) = report["models"]
    assert row["mean"] == 1.0
    assert row["sd"] == 0.0
    assert report["ess"]["t_eff"] is None
    assert any(w["code"] == "single_model_chain" for w in report["warnings"])


def test_declared_models_reported_with_flag(chain_file, capsys):
    report = run_json(
        capsys,
        ["analyze", "--input", str(chain_file), "--seed", "1", "--draws", "100",
         "--declared", "A,C"],
    )
    by_label = {row["label"]: row for row in report["models"]}
    assert by_label["C"]["never_sampled"] is True
    assert by_label["C"]["mean"] == 0.0
    assert by_label["A"]["never_sampled"] is False
    assert any(w["code"] == "never_sampled_model" for w in report["warnings"])


def test_optional_sections_present(chain_file, capsys):
    report = run_json(
        capsys,
        ["analyze", "--input", str(chain_file), "--seed", "4", "--draws", "200",
         "--top-k", "2", "--bf", "A,B", "--subset", "good=A"],
    )
    assert report["rank_stability"]["k_top"] == 2
    assert report["bayes_factors"][0]["numerator"] == "A"
    assert report["subsets"][0]["name"] == "good"
    assert report["models"][0]["rank"]["point_rank"] in (1, 2)


def test_top_k_clamped_with_warning(chain_file, capsys):
    report = run_json(
        capsys,
        ["analyze", "--input", str(chain_file), "--seed", "4", "--draws", "100",
         "--top-k", "10"],
    )
    assert report["rank_stability"]["k_top"] == 2
    assert any(w["code"] == "k_top_reduced" for w in report["warnings"])


def test_text_and_json_numbers_agree(chain_file, capsys):
    report = run_json(capsys, ["analyze", "--input", str(chain_file), "--seed", "8", "--draws", "250"])
    code = main(["analyze", "--input", str(chain_file), "--seed", "8", "--draws", "250"])
    text = capsys.readouterr().out
    assert code == 0
    for row in report["models"]:
        assert f"{row['mean']:.6g}" in text
        assert f"{row['sd']:.6g}" in text
    assert f"{report['ess']['t_eff']:.6g}" in text


def test_output_file_and_csv_format(chain_file, tmp_path, capsys):
    out = tmp_path / "report.csv"
    code = main(
        ["analyze", "--input", str(chain_file), "--seed", "1", "--draws", "100",
         "--out", str(out), "--out-format", "csv"]
    )
    assert code == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# chainuq=")
    assert lines[1].startswith("label,mean,sd")
    assert len([l for l in lines if not l.startswith("#")]) == 3  # header + 2 models


def test_matrix_epsilon_policy(tmp_path, chain_file, capsys):
    weights = tmp_path / "eps.csv"
    weights.write_text("0.5,0.5\n0.5,0.5\n", encoding="utf-8")
    report = run_json(
        capsys,
        ["analyze", "--input", str(chain_file), "--seed", "1", "--draws", "100",
         "--epsilon", f"matrix:{weights}"],
    )
    assert report["config"]["epsilon_total_mass"] == 2.0


def test_bench_smoke_writes_both_files(tmp_path, capsys):
    prefix = tmp_path / "cov"
    code = main(
        ["bench", "--pi", "0.7,0.3", "--beta-grid", "0,0.5", "--iterations", "80",
         "--replications", "3", "--draws", "60", "--seed", "5", "--out", str(prefix)]
    )
    assert code == 0
    csv_text = (tmp_path / "cov.csv").read_text(encoding="utf-8")
    payload = json.loads((tmp_path / "cov.json").read_text(encoding="utf-8"))
    assert csv_text.startswith("beta,method,component")
    assert payload["replications"] == 3
    assert len(payload["cells"]) == 4


def test_bench_identical_seed_is_byte_identical(tmp_path, capsys):
    args = ["bench", "--pi", "0.7,0.3", "--beta-grid", "0", "--iterations", "60",
            "--replications", "2", "--draws", "40", "--seed", "9"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_bench_bad_pi_exits_3(capsys):
    assert main(["bench", "--pi", "0.7,0.7"]) == 3
