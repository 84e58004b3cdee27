import json
import os

import pytest

from crystal_charge import Crystal, dump_crystal, grow_random
from crystal_charge.cli import main


def run_cli(*argv):
    return main(list(argv))


def test_verify_small_run_passes(tmp_path):
    out = tmp_path / "reports.jsonl"
    code = run_cli("verify", "--n", "5", "--boxes", "30", "--seeds", "3",
                   "--seed", "0", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    assert all(json.loads(line)["passed"] for line in lines)


def test_verify_3d_regression(tmp_path):
    code = run_cli("verify", "--n", "3", "--boxes", "40", "--seeds", "3",
                   "--out", str(tmp_path / "r.jsonl"))
    assert code == 0


def test_verify_rejects_unsupported_dimension(tmp_path, capsys):
    code = run_cli("verify", "--n", "6", "--boxes", "10", "--seeds", "1",
                   "--out", str(tmp_path / "r.jsonl"))
    assert code == 2
    assert "even dimensions above 4" in capsys.readouterr().err


def test_verify_usage_error_exit_code():
    assert run_cli("verify") == 2  # --n is required


def test_verify_loaded_partition(tmp_path):
    delta = grow_random(Crystal.empty(5), 25, seed=3)
    path = tmp_path / "partition.json"
    dump_crystal(delta, path)
    code = run_cli("verify", "--n", "5", "--in", str(path),
                   "--out", str(tmp_path / "r.jsonl"))
    assert code == 0


def test_verify_rejects_invalid_partition_file(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("[[0,0,0,0,0],[0,2,0,0,0]]")
    code = run_cli("verify", "--n", "5", "--in", str(path),
                   "--out", str(tmp_path / "r.jsonl"))
    assert code == 2
    assert "melting rule" in capsys.readouterr().err


def test_verify_outputs_are_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out in (out1, out2):
        assert run_cli("verify", "--n", "5", "--boxes", "20", "--seeds", "2",
                       "--seed", "7", "--out", str(out)) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_enumerate_counts(tmp_path, capsys):
    assert run_cli("enumerate", "--d", "3") == 0
    assert "ideals=20" in capsys.readouterr().out
    out = tmp_path / "ideals.jsonl"
    assert run_cli("enumerate", "--d", "2", "--out", str(out)) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 6
    assert json.loads(lines[0]) == []  # the empty ideal comes first


def test_lemma_command_runs(tmp_path):
    code = run_cli("lemma", "2", "--n", "5", "--samples", "50",
                   "--out", str(tmp_path / "l.jsonl"))
    assert code == 0


def test_lemma5_exhaustive_small(tmp_path, capsys):
    out = tmp_path / "l5.jsonl"
    code = run_cli("lemma5", "--n", "5", "--exhaustive", "--d", "3",
                   "--out", str(out))
    assert code == 0
    row = json.loads(out.read_text().splitlines()[0])
    assert row == {"d": 3, "n": 5, "mode": "exhaustive",
                   "ideals": 20, "violations": 0}


def test_lemma5_sampled(tmp_path):
    code = run_cli("lemma5", "--n", "7", "--d", "6", "--samples", "65",
                   "--out", str(tmp_path / "l5.jsonl"))
    assert code == 0


def test_lemma5_sampling_strategies(tmp_path):
    for strategy in ("closure", "walk"):
        out = tmp_path / f"l5_{strategy}.jsonl"
        code = run_cli("lemma5", "--n", "7", "--d", "6", "--samples", "40",
                       "--strategy", strategy, "--out", str(out))
        assert code == 0
        row = json.loads(out.read_text().splitlines()[0])
        assert row["ideals"] == 40 and row["violations"] == 0


def test_figure_data_bubbles_d2(tmp_path):
    out = tmp_path / "bubbles.csv"
    code = run_cli("figure-data", "bubbles", "--d", "2", "--n", "5",
                   "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "box_count,pole_order,count,in_G_count"
    assert sum(int(l.split(",")[2]) for l in lines[1:]) == 6


def test_figure_data_bubbles_d4_pole_strata(tmp_path):
    out = tmp_path / "bubbles4.csv"
    assert run_cli("figure-data", "bubbles", "--d", "4", "--n", "5",
                   "--out", str(out)) == 0
    pole_rows = [line for line in out.read_text().splitlines()[1:]
                 if line.split(",")[1] == "1"]
    assert {row.split(",")[0] for row in pole_rows} == {"15", "16"}


def test_projection_marker_pole_coincidence(tmp_path):
    out = tmp_path / "proj.json"
    code = run_cli("figure-data", "projection", "--n", "5", "--boxes", "60",
                   "--seed", "7", "--out", str(out))
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["coincide"] is True
    assert payload["marker_charges"] == payload["pole_charges"]
    assert sum(len(s["boxes"]) for s in payload["slices"]) == 60


def test_project_alias_matches_figure_data(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli("project", "--n", "5", "--boxes", "40", "--seed", "3",
                   "--out", str(a)) == 0
    assert run_cli("figure-data", "projection", "--n", "5", "--boxes", "40",
                   "--seed", "3", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_workers_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("CRYSTAL_CHARGE_WORKERS", "2")
    out1 = tmp_path / "a.jsonl"
    assert run_cli("lemma5", "--n", "7", "--d", "6", "--samples", "65",
                   "--out", str(out1)) == 0
    monkeypatch.delenv("CRYSTAL_CHARGE_WORKERS")
    out2 = tmp_path / "b.jsonl"
    assert run_cli("lemma5", "--n", "7", "--d", "6", "--samples", "65",
                   "--workers", "1", "--out", str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()
