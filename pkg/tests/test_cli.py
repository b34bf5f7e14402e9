"""Command-line surface: exit codes, output formats, reproducibility."""

import csv
import json
import math

import pytest

from crglimits import cli


def run(argv):
    return cli.main(argv)


def rows_of(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_usage_errors_exit_1(capsys):
    assert run([]) == 1
    assert run(["no-such-command"]) == 1
    assert run(["crt"]) == 1  # missing --seed
    assert run(["component", "--seed", "1", "--k", "2"]) == 1
    capsys.readouterr()


def test_parameter_errors_exit_1(capsys):
    assert run(["verify", "--seed", "1", "--suite", "bogus"]) == 1
    assert run(["urn", "continuous", "--seed", "1", "--m", "2",
                "--steps", "3"]) == 1
    assert run(["component", "--procedure", "1", "--k", "2",
                "--segments", "0", "--seed", "1"]) == 1
    err = capsys.readouterr().err
    assert "error" in err


def test_kernels_enumerate_probabilities(tmp_path):
    out = tmp_path / "k2.csv"
    assert run(["kernels", "enumerate", "--k", "2", "--out",
                str(out)]) == 0
    rows = rows_of(out)
    assert len(rows) == 2
    probs = sorted(float(r["probability"]) for r in rows)
    assert probs == pytest.approx([0.4, 0.6], abs=1e-12)


def test_crt_csv_columns(tmp_path):
    out = tmp_path / "crt.csv"
    assert run(["crt", "--seed", "3", "--trials", "5", "--segments", "2",
                "--out", str(out)]) == 0
    rows = rows_of(out)
    assert len(rows) == 5
    assert set(rows[0]) == {"trial", "total_length", "root_to_first_leaf"}
    for r in rows:
        assert 0 < float(r["root_to_first_leaf"]) <= float(r["total_length"])


def test_component_cycle_mean_band(tmp_path):
    out = tmp_path / "cyc.csv"
    assert run(["component", "--procedure", "2", "--k", "1",
                "--segments", "0", "--trials", "4000", "--seed", "7",
                "--out", str(out)]) == 0
    vals = [float(r["cycle_length"]) for r in rows_of(out)]
    mean = sum(vals) / len(vals)
    assert 0.76 < mean < 0.84  # sqrt(2/pi) with 4e3-trial noise


def test_reruns_are_byte_identical(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    argv = ["component", "--procedure", "2", "--k", "2", "--segments", "2",
            "--trials", "40", "--seed", "11"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_jobs_do_not_change_bytes(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    argv = ["core-lengths", "--k", "2", "--trials", "50", "--seed", "13"]
    assert run(argv + ["--out", str(a)]) == 0
    assert run(argv + ["--jobs", "3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_component_text_format(tmp_path):
    out = tmp_path / "c.txt"
    assert run(["component", "--procedure", "2", "--k", "1",
                "--segments", "0", "--trials", "1", "--seed", "5",
                "--format", "text", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("V 0")
    assert "\nI " in text  # the cycle identification
    assert run(["component", "--procedure", "2", "--k", "1",
                "--segments", "0", "--trials", "2", "--seed", "5",
                "--format", "text"]) == 1


def test_core_lengths_columns(tmp_path):
    out = tmp_path / "core.csv"
    assert run(["core-lengths", "--k", "3", "--trials", "4", "--seed", "9",
                "--out", str(out)]) == 0
    rows = rows_of(out)
    assert set(rows[0]) == {"trial", "total", "l_1", "l_2", "l_3", "l_4",
                            "l_5", "l_6"}
    for r in rows:
        parts = [float(r[f"l_{j}"]) for j in range(1, 7)]
        assert math.fsum(parts) == pytest.approx(float(r["total"]),
                                                 rel=1e-9)


def test_urn_continuous_csv(tmp_path):
    out = tmp_path / "urn.csv"
    assert run(["urn", "continuous", "--seed", "2", "--m", "3",
                "--steps", "5", "--trials", "2", "--checkpoints", "0,5",
                "--out", str(out)]) == 0
    rows = rows_of(out)
    assert len(rows) == 4  # 2 trials x 2 checkpoints
    assert set(rows[0]) == {"trial", "n", "L_1", "L_2", "L_3",
                            "N_1", "N_2", "N_3", "C"}
    final = [r for r in rows if r["n"] == "5"]
    for r in final:
        assert sum(int(r[f"N_{j}"]) for j in (1, 2, 3)) == 3 + 2 * 5
        s = math.fsum(float(r[f"L_{j}"]) for j in (1, 2, 3))
        assert s == pytest.approx(float(r["C"]), rel=1e-9)


def test_urn_polya_csv(tmp_path):
    out = tmp_path / "polya.csv"
    assert run(["urn", "polya", "--seed", "2", "--m", "2", "--steps", "6",
                "--trials", "3", "--out", str(out)]) == 0
    rows = rows_of(out)
    assert len(rows) == 3
    for r in rows:
        assert int(r["N_1"]) + int(r["N_2"]) == 2 + 2 * 6
        assert int(r["N_1"]) % 2 == 1


def test_gnp_sample_csv(tmp_path):
    out = tmp_path / "gnp.csv"
    assert run(["gnp", "sample", "--seed", "4", "--n", "400",
                "--lambda", "0.5", "--min-size", "5", "--out",
                str(out)]) == 0
    rows = rows_of(out)
    assert rows
    assert set(rows[0]) == {"component", "size", "surplus", "core_edges",
                            "lengths", "kernel_class"}
    for r in rows:
        assert int(r["size"]) >= 5
    assert run(["gnp", "sample", "--seed", "4", "--n", "400",
                "--p", "0.002", "--lambda", "1.0"]) == 1


def test_gnp_harvest_success_and_shortfall(tmp_path, capsys):
    out = tmp_path / "h.csv"
    assert run(["gnp", "harvest", "--seed", "4", "--n", "1500",
                "--lambda", "0", "--k", "1", "--count", "5",
                "--max-graphs", "3000", "--out", str(out)]) == 0
    rows = rows_of(out)
    assert len(rows) == 5
    assert set(rows[0]) == {"n", "lambda", "size", "surplus", "sigma_hat",
                            "lengths", "kernel_class"}
    short = tmp_path / "short.csv"
    code = run(["gnp", "harvest", "--seed", "4", "--n", "1500",
                "--lambda", "0", "--k", "3", "--count", "40",
                "--max-graphs", "200", "--out", str(short)])
    assert code == 3
    assert "incomplete" in capsys.readouterr().err
    assert short.exists()  # partial rows (possibly none) still written


def test_verify_json_and_exit_codes(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify", "--seed", "42", "--suite", "identities",
                "--out", str(out)]) == 0
    reports = json.loads(out.read_text())
    assert all(r["pass"] for r in reports)
    assert {r["seed"] for r in reports} == {42}
    names = {r["test"] for r in reports}
    assert any(n.startswith("rayleigh-dirichlet") for n in names)
    assert any(n.startswith("duplication") for n in names)


def test_verify_failed_gate_exits_2(tmp_path, monkeypatch):
    from crglimits import verify as vmod
    from crglimits.stats import make_report

    def always_fails(stream, seed):
        return [make_report("forced-failure", 10, 1.0, 0.5, seed)]

    monkeypatch.setitem(vmod.GATES, "crt-root", always_fails)
    out = tmp_path / "fail.json"
    assert run(["verify", "--seed", "1", "--suite", "crt-root",
                "--out", str(out)]) == 2
    reports = json.loads(out.read_text())
    assert reports[0]["pass"] is False
