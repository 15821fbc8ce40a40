import json

import numpy as np
import pytest

from qscorer import ScorerConfig, ScoringError, batch_score, read_dataset
from qscorer.cli import main

from conftest import write_dataset


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "dataset.jsonl"
    write_dataset(path, 50)
    return path


class TestReadDataset:
    def test_round_trip(self, dataset):
        records = list(read_dataset(dataset))
        assert len(records) == 50
        assert records[0].id == "svit0000000"
        assert records[0].conversations[1][0] == "assistant"

    def test_bad_line_names_location(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a"}\n')
        with pytest.raises(ScoringError, match="bad.jsonl:1"):
            list(read_dataset(path))


class TestMockBatch:
    def test_scores_every_record(self, dataset, tmp_path):
        out = tmp_path / "scores.jsonl"
        summary = batch_score(dataset, out, ScorerConfig(seed=3))
        assert (summary.scored, summary.skipped, summary.resumed) == (50, 0, 0)
        lines = out.read_text().splitlines()
        assert len(lines) == 50
        obj = json.loads(lines[0])
        assert set(obj) == {"id", "clip_score", "loss", "token_length",
                            "task_type"}

    def test_input_order_preserved(self, dataset, tmp_path):
        out = tmp_path / "scores.jsonl"
        batch_score(dataset, out, ScorerConfig(seed=3))
        ids = [json.loads(l)["id"] for l in out.read_text().splitlines()]
        assert ids == sorted(ids) == [f"svit{i:07d}" for i in range(50)]

    def test_rerun_without_resume_overwrites(self, dataset, tmp_path):
        out = tmp_path / "scores.jsonl"
        batch_score(dataset, out, ScorerConfig(seed=3))
        first = out.read_bytes()
        batch_score(dataset, out, ScorerConfig(seed=3))
        assert out.read_bytes() == first


class TestResume:
    def test_resume_is_byte_identical(self, dataset, tmp_path):
        full = tmp_path / "full.jsonl"
        batch_score(dataset, full, ScorerConfig(seed=3))

        part = tmp_path / "part.jsonl"
        lines = full.read_text().splitlines(keepends=True)
        # simulate an interruption mid-write: 20 whole lines plus a torn one
        part.write_text("".join(lines[:20]) + lines[20][:15])
        summary = batch_score(dataset, part, ScorerConfig(seed=3), resume=True)
        assert summary.resumed == 20
        assert summary.scored == 30
        assert part.read_bytes() == full.read_bytes()

    def test_resume_on_complete_file_is_noop(self, dataset, tmp_path):
        out = tmp_path / "scores.jsonl"
        batch_score(dataset, out, ScorerConfig(seed=3))
        before = out.read_bytes()
        summary = batch_score(dataset, out, ScorerConfig(seed=3), resume=True)
        assert summary.scored == 0 and summary.resumed == 50
        assert out.read_bytes() == before


class TestRealModeStubs:
    def test_stub_models_flow_through(self, dataset, tmp_path):
        cfg = ScorerConfig(mode="real", image_encoder="e", text_encoder="e",
                           language_model="m")
        out = tmp_path / "scores.jsonl"
        summary = batch_score(
            dataset, out, cfg,
            image_encoder=lambda _p: np.array([1.0, 0.0]),
            text_encoder=lambda _t: np.array([1.0, 1.0]),
            loss_model=lambda _p, _c: [-0.25] * 8,
        )
        assert summary.scored == 50
        obj = json.loads(out.read_text().splitlines()[0])
        assert obj["loss"] == pytest.approx(2.0)
        assert obj["token_length"] == 8
        assert obj["clip_score"] == pytest.approx(2 ** -0.5)

    def test_failing_sample_is_skipped(self, dataset, tmp_path):
        cfg = ScorerConfig(mode="real", image_encoder="e", text_encoder="e",
                           language_model="m")

        def flaky_loss(path, _convs):
            if "0000003" in path:
                raise ScoringError("undecodable image")
            return [-1.0]

        out = tmp_path / "scores.jsonl"
        summary = batch_score(
            dataset, out, cfg,
            image_encoder=lambda _p: np.array([1.0]),
            text_encoder=lambda _t: np.array([1.0]),
            loss_model=flaky_loss,
        )
        assert summary.scored == 49 and summary.skipped == 1
        ids = {json.loads(l)["id"] for l in out.read_text().splitlines()}
        assert "svit0000003" not in ids


class TestCli:
    def test_score_subcommand(self, dataset, tmp_path, capsys):
        out = tmp_path / "scores.jsonl"
        rc = main(["score", "--dataset", str(dataset), "--out", str(out),
                   "--seed", "3"])
        assert rc == 0
        assert "scored 50" in capsys.readouterr().err
        assert len(out.read_text().splitlines()) == 50

    def test_cli_matches_library_bytes(self, dataset, tmp_path):
        lib_out = tmp_path / "lib.jsonl"
        batch_score(dataset, lib_out, ScorerConfig(seed=3))
        cli_out = tmp_path / "cli.jsonl"
        main(["score", "--dataset", str(dataset), "--out", str(cli_out),
              "--seed", "3"])
        assert cli_out.read_bytes() == lib_out.read_bytes()

    def test_missing_dataset_is_error(self, tmp_path):
        rc = main(["score", "--dataset", str(tmp_path / "nope.jsonl"),
                   "--out", str(tmp_path / "out.jsonl")])
        assert rc == 1

    def test_real_mode_without_models_is_error(self, dataset, tmp_path):
        rc = main(["score", "--dataset", str(dataset), "--mode", "real",
                   "--out", str(tmp_path / "out.jsonl")])
        assert rc == 1
