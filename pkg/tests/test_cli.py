import csv
import io
import json

import pytest

from emokin.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, run
from emokin.features import N_FEATURES
from emokin.skeleton import load_clip


@pytest.fixture(scope="module")
def data_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    code = run([
        "--seed", "7", "synth", "--subjects", "3", "--per-class", "2", "--out", str(out),
    ])
    assert code == EXIT_OK
    return out


@pytest.fixture(scope="module")
def model_path(tmp_path_factory, data_dir):
    out = tmp_path_factory.mktemp("model") / "m.json"
    code = run(["train", "--data", str(data_dir), "--out", str(out)])
    assert code == EXIT_OK
    return out


class TestSynth:
    def test_writes_clips_and_manifest(self, data_dir, capsys):
        manifest = json.loads((data_dir / "manifest.json").read_text())
        assert len(manifest) == 3 * 6 * 2
        assert all((data_dir / e["path"]).exists() for e in manifest)

    def test_stdout_is_json_summary(self, tmp_path, capsys):
        code = run(["--seed", "1", "synth", "--subjects", "1", "--per-class", "1",
                    "--out", str(tmp_path / "d")])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["clips"] == 6

    def test_deterministic_files(self, tmp_path, capsys):
        for name in ("a", "b"):
            assert run(["--seed", "3", "synth", "--subjects", "1", "--per-class", "1",
                        "--out", str(tmp_path / name)]) == EXIT_OK
        capsys.readouterr()
        for entry in json.loads((tmp_path / "a" / "manifest.json").read_text()):
            assert (tmp_path / "a" / entry["path"]).read_bytes() == (
                tmp_path / "b" / entry["path"]
            ).read_bytes()


class TestExtract:
    def test_csv_has_all_feature_columns(self, data_dir, capsys):
        manifest = json.loads((data_dir / "manifest.json").read_text())
        clip_path = data_dir / manifest[0]["path"]
        assert run(["extract", "--clip", str(clip_path)]) == EXIT_OK
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert len(rows[0]) == 1 + N_FEATURES
        assert rows[0][0] == "t"
        assert len(rows) > 10

    def test_missing_file_is_data_error(self, capsys):
        assert run(["extract", "--clip", "/nonexistent.jsonl"]) == EXIT_DATA


class TestSegment:
    def test_json_segments(self, data_dir, capsys):
        manifest = json.loads((data_dir / "manifest.json").read_text())
        clip_path = data_dir / manifest[0]["path"]
        assert run(["segment", "--clip", str(clip_path),
                    "--tau-on", "0.05", "--min-len", "10"]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert "segments" in doc
        for seg in doc["segments"]:
            assert seg["end_frame"] >= seg["start_frame"]

    def test_emit_clips(self, data_dir, tmp_path, capsys):
        manifest = json.loads((data_dir / "manifest.json").read_text())
        clip_path = data_dir / manifest[0]["path"]
        out = tmp_path / "segs"
        assert run(["segment", "--clip", str(clip_path), "--tau-on", "0.05",
                    "--min-len", "10", "--emit-clips", str(out)]) == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        emitted = list(out.glob("*.jsonl"))
        assert len(emitted) == len(doc["segments"])
        if emitted:
            load_clip(emitted[0])


class TestTrainPredict:
    def test_model_file_written(self, model_path):
        doc = json.loads(model_path.read_text())
        assert doc["version"] == "1"
        assert len(doc["machines"]) == 15
        assert len(doc["machines"][0]["w"]) == 750

    def test_predict_training_clip(self, data_dir, model_path, capsys):
        manifest = json.loads((data_dir / "manifest.json").read_text())
        entry = manifest[0]
        code = run(["predict", "--model", str(model_path),
                    "--clip", str(data_dir / entry["path"])])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["label"] == entry["label"]
        assert len(doc["losses"]) == 6

    def test_train_missing_class_names_it(self, data_dir, tmp_path, capsys):
        pruned = tmp_path / "pruned"
        pruned.mkdir()
        manifest = [e for e in json.loads((data_dir / "manifest.json").read_text())
                    if e["label"] != "surprise"]
        for e in manifest:
            (pruned / e["path"]).write_bytes((data_dir / e["path"]).read_bytes())
        (pruned / "manifest.json").write_text(json.dumps(manifest))
        code = run(["train", "--data", str(pruned), "--out", str(tmp_path / "m.json")])
        assert code == EXIT_DATA
        assert "surprise" in capsys.readouterr().err


class TestEvaluate:
    def test_json_style(self, data_dir, capsys):
        code = run(["evaluate", "--data", str(data_dir), "--protocol", "loso",
                    "--style", "json"])
        assert code == EXIT_OK
        doc = json.loads(capsys.readouterr().out)
        assert doc["reports"][0]["protocol"] == "loso"

    def test_csv_style_with_both_protocols(self, data_dir, capsys):
        code = run(["evaluate", "--data", str(data_dir), "--protocol", "both",
                    "--repeats", "2", "--style", "csv", "--human-reference"])
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0] == ["class", "split", "loso", "human"]

    def test_four_class_paper_table(self, data_dir, capsys):
        code = run(["evaluate", "--data", str(data_dir), "--classes", "4",
                    "--repeats", "2"])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "total" in out
        assert "disgust" not in out


class TestInspect:
    def test_histogram_csv(self, data_dir, capsys):
        code = run(["inspect", "--data", str(data_dir), "--feature", "kinetic_energy"])
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert rows[0][:3] == ["bin", "lo", "hi"]
        assert len(rows) == 31

    def test_unknown_feature_is_usage_error(self, data_dir, capsys):
        assert run(["inspect", "--data", str(data_dir), "--feature", "bogus"]) == EXIT_USAGE


class TestUsage:
    def test_unknown_flag_rejected(self, capsys):
        assert run(["synth", "--bogus-flag", "1", "--out", "x"]) == EXIT_USAGE
        assert "usage" in capsys.readouterr().err.lower()

    def test_no_command(self, capsys):
        assert run([]) == EXIT_USAGE

    def test_unknown_command(self, capsys):
        assert run(["frobnicate"]) == EXIT_USAGE


def test_pipeline_composition(tmp_path, capsys):
    # synth -> train -> evaluate with documented flags only
    data = tmp_path / "d"
    assert run(["--seed", "5", "synth", "--subjects", "2", "--per-class", "2",
                "--out", str(data)]) == EXIT_OK
    json.loads(capsys.readouterr().out)
    model = tmp_path / "m.json"
    assert run(["train", "--data", str(data), "--out", str(model)]) == EXIT_OK
    json.loads(capsys.readouterr().out)
    assert run(["evaluate", "--data", str(data), "--protocol", "split",
                "--repeats", "2", "--style", "json"]) == EXIT_OK
    json.loads(capsys.readouterr().out)
