import json

import pytest

from causaltext.cli import main

from conftest import (FIVE_VAR_PREMISE, FIVE_VAR_STEP_8, JUNK_FOOD_STEP_8,
                      THREE_VAR_PREMISE)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSolve:
    def test_fixture_five_var(self, capsys):
        code, out, _ = run_cli(capsys, "solve", "--fixture", "five-var")
        assert code == 0
        assert "Step 9  answer: Yes" in out

    def test_premise_file_with_hypothesis_block(self, tmp_path, capsys):
        path = tmp_path / "premise.txt"
        path.write_text(f"Premise: {THREE_VAR_PREMISE}\n"
                        f"Hypothesis: A directly affects C.")
        code, out, _ = run_cli(capsys, "solve", "--premise", str(path),
                               "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["step_9"]["answer"] == "Yes"

    def test_trace_file(self, tmp_path, capsys):
        path = tmp_path / "premise.txt"
        path.write_text(FIVE_VAR_PREMISE)
        trace_path = tmp_path / "trace.json"
        code, _, _ = run_cli(capsys, "solve", "--premise", str(path),
                             "--hypothesis",
                             "There exists at least one collider (i.e., common"
                             " effect) of A and B.",
                             "--trace", str(trace_path))
        assert code == 0
        trace = json.loads(trace_path.read_text())
        assert trace["step_8"] == FIVE_VAR_STEP_8

    def test_parse_error_exits_2(self, tmp_path, capsys):
        path = tmp_path / "bad.txt"
        path.write_text("This premise is nonsense prose.")
        code, _, err = run_cli(capsys, "solve", "--premise", str(path))
        assert code == 2
        assert "unrecognized" in err

    def test_missing_file_exits_1(self, capsys):
        code, _, err = run_cli(capsys, "solve", "--premise", "/no/such/file")
        assert code == 1


class TestGenerate:
    def test_summary_counts(self, tmp_path, capsys):
        out_path = tmp_path / "ds.jsonl"
        code, out, _ = run_cli(capsys, "generate", "--n", "3",
                               "-o", str(out_path), "--format", "json")
        assert code == 0
        summary = json.loads(out)
        assert summary["dags"] == 25 and summary["mecs"] == 11
        assert summary["rows"] == 264

    def test_bounds_error(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "generate", "--n", "7",
                               "-o", str(tmp_path / "x.jsonl"))
        assert code == 2

    def test_balanced_requires_seed(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "generate", "--n", "3", "--balanced", "5",
                               "-o", str(tmp_path / "x.jsonl"))
        assert code == 2
        assert "seed" in err

    def test_capacity_error_exits_1(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "generate", "--n", "2", "--balanced", "1",
                               "--seed", "1", "-o", str(tmp_path / "x.jsonl"))
        assert code == 1
        assert "n_vars=2" in err

    def test_story_generation_is_deterministic(self, tmp_path, capsys):
        a = tmp_path / "a.jsonl"
        b = tmp_path / "b.jsonl"
        for path in (a, b):
            code, _, _ = run_cli(capsys, "generate", "--n", "3", "--style",
                                 "story", "--theme", "health", "--balanced", "4",
                                 "--seed", "7", "-o", str(path))
            assert code == 0
        assert a.read_bytes() == b.read_bytes()


class TestEvalAndScore:
    @pytest.fixture()
    def dataset(self, tmp_path, capsys):
        path = tmp_path / "ds.jsonl"
        code, _, _ = run_cli(capsys, "generate", "--n", "3", "--balanced", "4",
                             "--seed", "3", "-o", str(path))
        assert code == 0
        return path

    def test_mock_eval_perfect(self, tmp_path, dataset, capsys):
        out_dir = tmp_path / "run"
        code, out, _ = run_cli(capsys, "eval", "--dataset", str(dataset),
                               "--backend", "mock", "--out", str(out_dir),
                               "--format", "json")
        assert code == 0
        report = json.loads(out)
        overall = report["overall"]
        assert all(overall[k] == 1.0 for k in ("accuracy", "f1", "precision", "recall"))
        assert all(v == 1.0 for v in report["step_accuracy"].values())
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert set(manifest) == {"version", "config_digest", "dataset_digest",
                                 "mode", "n_records"}
        assert str(tmp_path) not in json.dumps(manifest)

    def test_record_then_replay(self, tmp_path, dataset, capsys):
        run_a = tmp_path / "a"
        code, _, _ = run_cli(capsys, "eval", "--dataset", str(dataset),
                             "--backend", "mock", "--out", str(run_a), "--record")
        assert code == 0
        run_b = tmp_path / "b"
        code, out, _ = run_cli(capsys, "eval", "--dataset", str(dataset),
                               "--replay", str(run_a / "transcripts"),
                               "--out", str(run_b), "--format", "json")
        assert code == 0
        a = json.loads((run_a / "metrics.json").read_text())
        b = json.loads((run_b / "metrics.json").read_text())
        assert a == b

    def test_score_from_records(self, tmp_path, dataset, capsys):
        out_dir = tmp_path / "run"
        run_cli(capsys, "eval", "--dataset", str(dataset), "--backend", "mock",
                "--out", str(out_dir))
        code, out, _ = run_cli(capsys, "score", "--records", str(out_dir),
                               "--group-by", "n_vars,subtask", "--format", "json")
        assert code == 0
        report = json.loads(out)
        assert report["overall"]["accuracy"] == 1.0
        assert all(v == 1.0 for v in report["subtask_accuracy"].values())

    def test_score_empty_dir_exits_2(self, tmp_path, capsys):
        code, _, _ = run_cli(capsys, "score", "--records", str(tmp_path))
        assert code == 2

    def test_missing_auth_env_fails_before_request(self, tmp_path, dataset,
                                                   capsys, monkeypatch):
        monkeypatch.delenv("MISSING_TOKEN", raising=False)
        code, _, err = run_cli(capsys, "eval", "--dataset", str(dataset),
                               "--backend", "https://api.invalid/v1/chat",
                               "--auth-env", "MISSING_TOKEN",
                               "--out", str(tmp_path / "x"))
        assert code == 2
        assert "MISSING_TOKEN" in err

    def test_backend_and_replay_mutually_exclusive(self, tmp_path, dataset,
                                                   capsys):
        with pytest.raises(SystemExit) as err:
            main(["eval", "--dataset", str(dataset), "--backend", "mock",
                  "--replay", "x", "--out", str(tmp_path / "x")])
        assert err.value.code == 2


class TestConfigFile:
    def test_defaults_from_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"version": 1,
                                   "defaults": {"format": "json"}}))
        code, out, _ = run_cli(capsys, "--config", str(cfg), "solve",
                               "--fixture", "junk-food")
        assert code == 0
        assert json.loads(out)["step_8"] == JUNK_FOOD_STEP_8

    def test_flag_beats_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"version": 1,
                                   "defaults": {"format": "json"}}))
        code, out, _ = run_cli(capsys, "--config", str(cfg), "solve",
                               "--fixture", "junk-food", "--format", "text")
        assert code == 0
        assert "Step 9  answer: Yes" in out

    def test_bad_version_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"version": 99, "defaults": {}}))
        code, _, err = run_cli(capsys, "--config", str(cfg), "solve",
                               "--fixture", "junk-food")
        assert code == 2
