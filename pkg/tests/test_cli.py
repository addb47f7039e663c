"""End-to-end command-line behavior: artifacts, determinism, exit codes."""
import json

import numpy as np
import pytest

from foldwarp.cli import run

from test_fileio import _full_rows, _write_csv


def _prep_csv(tmp_path):
    path = tmp_path / "data.csv"
    _write_csv(
        path,
        _full_rows(
            entities=("gA", "gB", "gC", "gD"),
            times=(2, 4, 7, 14, 21),
            value=lambda e, k, r, t: float(hash((e, k, r, t)) % 97) / 10 + 1,
        ),
    )
    return path


def test_cluster_from_scenario_with_evaluation(tmp_path):
    out = tmp_path / "run"
    code = run([
        "cluster", "--scenario", "m2", "--n-entities", "40", "--k", "4",
        "--n-init", "8", "--s-max", "2", "--seed", "7", "--out-dir", str(out),
    ])
    assert code == 0
    for name in ("clusters.csv", "owd.tsv", "ow.tsv", "summary.json", "truth.csv"):
        assert (out / name).exists()
    assert sorted(p.name for p in (out / "plotdata").iterdir()) == [
        f"cluster_{k:02d}.csv" for k in (1, 2, 3, 4)
    ]
    summary = json.loads((out / "summary.json").read_text())
    assert {"ari", "v_measure", "silhouette", "total_cost"} <= set(summary)
    assert summary["config"]["seed"] == 7
    assert summary["config"]["s_max"] == 2
    assert len(summary["n_iterations_per_init"]) == 8


def test_cluster_determinism_byte_identical(tmp_path):
    args = [
        "cluster", "--scenario", "m1-c1", "--n-entities", "30", "--k", "3",
        "--n-init", "5", "--seed", "11",
    ]
    assert run(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert run(args + ["--out-dir", str(tmp_path / "b")]) == 0
    for name in ("summary.json", "clusters.csv", "owd.tsv", "ow.tsv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_full_pipeline_from_csv(tmp_path):
    data = _prep_csv(tmp_path)
    est_out = tmp_path / "est"
    assert run(["estimate", "--input", str(data), "--out-dir", str(est_out)]) == 0
    assert (est_out / "fcset" / "means.tsv").exists()

    clu_out = tmp_path / "clu"
    code = run([
        "cluster", "--input", str(est_out / "fcset"), "--k", "2", "--n-init", "4",
        "--s-max", "1", "--seed", "3", "--out-dir", str(clu_out),
    ])
    assert code == 0

    # score the predictions against themselves through the evaluate surface
    code = run([
        "evaluate", "--input", str(clu_out / "clusters.csv"),
        "--truth", str(clu_out / "clusters.csv"), "--out-dir", str(tmp_path / "ev"),
    ])
    assert code == 0
    scores = json.loads((tmp_path / "ev" / "evaluation.json").read_text())
    assert scores["ari"] == 1.0 and scores["v_measure"] == 1.0


def test_cluster_direct_from_csv_with_scaling(tmp_path):
    data = _prep_csv(tmp_path)
    out = tmp_path / "direct"
    code = run([
        "cluster", "--input", str(data), "--scale-std", "--scale-norm",
        "--k", "2", "--n-init", "3", "--s-max", "1", "--seed", "1",
        "--out-dir", str(out), "--lambda", "0.5",
    ])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["penalty_weight"] == 0.5
    assert summary["config"]["scale_std"] is True


def test_truth_file_evaluation_in_cluster(tmp_path):
    sim_out = tmp_path / "sim"
    assert run(["simulate", "--scenario", "m2", "--n-entities", "25",
                "--seed", "5", "--out-dir", str(sim_out)]) == 0
    assert (sim_out / "shifts.csv").exists()
    clu_out = tmp_path / "clu"
    code = run([
        "cluster", "--input", str(sim_out / "fcset"), "--k", "4", "--n-init", "4",
        "--s-max", "2", "--seed", "5", "--truth", str(sim_out / "truth.csv"),
        "--out-dir", str(clu_out),
    ])
    assert code == 0
    summary = json.loads((clu_out / "summary.json").read_text())
    assert "ari" in summary and "v_measure" in summary


def test_sweep_k_table_and_figure(tmp_path):
    out = tmp_path / "sweep"
    code = run([
        "sweep-k", "--scenario", "m1-c2", "--n-entities", "30", "--k-min", "2",
        "--k-max", "5", "--n-init", "3", "--seed", "2", "--figures",
        "--out-dir", str(out),
    ])
    assert code == 0
    lines = (out / "sweep.tsv").read_text().splitlines()
    assert lines[0] == "k\ttotal_cost\tsilhouette"
    assert len(lines) == 5
    ks = [int(l.split("\t")[0]) for l in lines[1:]]
    assert ks == [2, 3, 4, 5]
    assert (out / "sweep.png").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert [row["k"] for row in summary["sweep"]] == ks


def test_figures_rendered_when_requested(tmp_path):
    out = tmp_path / "figs"
    code = run([
        "cluster", "--scenario", "m2", "--n-entities", "20", "--k", "3",
        "--n-init", "3", "--s-max", "1", "--seed", "4", "--figures",
        "--out-dir", str(out),
    ])
    assert code == 0
    pngs = sorted(p.name for p in (out / "figures").iterdir())
    assert pngs == ["cluster_01.png", "cluster_02.png", "cluster_03.png"]


def test_bench_reports_speed_and_equality(tmp_path):
    out = tmp_path / "bench"
    code = run([
        "bench", "--scenario", "m2", "--n-entities", "30", "--k", "3",
        "--n-init", "3", "--s-max", "2", "--seed", "6", "--out-dir", str(out),
    ])
    assert code == 0
    payload = json.loads((out / "bench.json").read_text())
    assert payload["outputs_match"] is True
    assert payload["seconds_classic"] > 0 and payload["seconds_fast_total"] > 0


@pytest.mark.filterwarnings("ignore::foldwarp.exceptions.DegenerateVarianceWarning")
def test_exit_codes_by_error_family(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("")
    assert run(["estimate", "--input", str(bad), "--out-dir", str(tmp_path / "x")]) == 3

    dup = tmp_path / "dup.csv"
    _write_csv(dup, _full_rows() + ["gA,0,r1,2,9.9"])
    assert run(["estimate", "--input", str(dup), "--out-dir", str(tmp_path / "x")]) == 3

    neg = tmp_path / "neg.csv"
    _write_csv(neg, _full_rows(value=lambda e, k, r, t: -2.0))
    assert run(["estimate", "--input", str(neg), "--log-transform",
                "--out-dir", str(tmp_path / "x")]) == 3

    # configuration family: both inputs given
    assert run(["cluster", "--input", str(dup), "--scenario", "m2",
                "--out-dir", str(tmp_path / "x")]) == 5

    # warp step too large for the grid
    data = _prep_csv(tmp_path)
    assert run(["cluster", "--input", str(data), "--k", "2", "--s-max", "4",
                "--seed", "0", "--out-dir", str(tmp_path / "x")]) == 5

    # numeric degeneracy family: std scaling over a zero-variance cell
    flat = tmp_path / "flat.csv"
    _write_csv(flat, _full_rows(value=lambda e, k, r, t: 1.0))
    assert run(["cluster", "--input", str(flat), "--scale-std", "--k", "2",
                "--seed", "0", "--out-dir", str(tmp_path / "x")]) == 6
    capsys.readouterr()


def test_missing_seed_is_generated_and_logged(tmp_path, capsys):
    out = tmp_path / "noseed"
    code = run(["cluster", "--scenario", "m1-c1", "--n-entities", "15", "--k", "2",
                "--n-init", "2", "--out-dir", str(out)])
    assert code == 0
    err = capsys.readouterr().err
    assert "using seed" in err
    summary = json.loads((out / "summary.json").read_text())
    assert isinstance(summary["config"]["seed"], int)
