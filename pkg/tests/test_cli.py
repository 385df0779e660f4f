import json

import pytest

from assort.cli import main
from assort.ensemble import load_bundle, summarize_supervised
from assort.embeddings import StubEmbeddingProvider
from conftest import DESK_CONFIG_VALUES, FIXTURE_CORPUS, TINY_CORPUS


@pytest.fixture()
def desk_config_path(tmp_path):
    path = tmp_path / "desk.json"
    path.write_text(json.dumps(DESK_CONFIG_VALUES))
    return str(path)


def run_cli(*args):
    return main(list(args))


class TestTrain:
    def test_bundle_roundtrip_and_manifest(self, tmp_path, desk_config_path):
        out = tmp_path / "bundle.json"
        code = run_cli(
            "train", "--corpus", str(FIXTURE_CORPUS), "--config", desk_config_path,
            "--seed", "7", "--out", str(out), "--stub-models",
        )
        assert code == 0
        embedder = StubEmbeddingProvider(dimension=64, seed=0)
        bundle = load_bundle(out, embedder)
        assert bundle.theta == 0.5
        manifest = json.loads((tmp_path / "bundle.json.manifest.json").read_text())
        assert manifest["command"] == "train"
        assert manifest["seed"] == 7
        assert manifest["artifacts"] == [str(out)]

    def test_missing_corpus_file(self, tmp_path):
        code = run_cli(
            "train", "--corpus", str(tmp_path / "absent.jsonl"),
            "--out", str(tmp_path / "b.json"), "--stub-models",
        )
        assert code == 3

    def test_byte_identical_across_runs(self, tmp_path, desk_config_path):
        out1, out2 = tmp_path / "b1.json", tmp_path / "b2.json"
        for out in (out1, out2):
            assert run_cli(
                "train", "--corpus", str(FIXTURE_CORPUS), "--config", desk_config_path,
                "--seed", "3", "--out", str(out), "--stub-models",
            ) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestSummarize:
    def _train(self, tmp_path, desk_config_path):
        bundle_path = tmp_path / "bundle.json"
        assert run_cli(
            "train", "--corpus", str(FIXTURE_CORPUS), "--config", desk_config_path,
            "--seed", "7", "--out", str(bundle_path), "--stub-models",
        ) == 0
        return bundle_path

    def test_json_output_matches_library(self, tmp_path, desk_config_path):
        bundle_path = self._train(tmp_path, desk_config_path)
        out = tmp_path / "summaries.json"
        assert run_cli(
            "summarize", "--bundle", str(bundle_path), "--post", str(TINY_CORPUS),
            "--config", desk_config_path, "--format", "json", "--out", str(out),
            "--stub-models",
        ) == 0
        doc = json.loads(out.read_text())
        assert doc["mode"] == "supervised"
        assert len(doc["posts"]) == 3

        from assort.corpus import load_corpus

        embedder = StubEmbeddingProvider(dimension=64, seed=0)
        bundle = load_bundle(bundle_path, embedder)
        corpus = load_corpus(TINY_CORPUS)
        for entry in doc["posts"]:
            post = corpus.posts_by_id()[entry["post_id"]]
            question = corpus.question_for(post)
            summary = summarize_supervised(bundle, question, post, embedder)
            assert entry["selected"] == list(summary.selected)
            assert entry["scores"] == pytest.approx(list(summary.scores))

    def test_html_output_byte_stable(self, tmp_path, desk_config_path):
        bundle_path = self._train(tmp_path, desk_config_path)
        outs = []
        for name in ("a.html", "b.html"):
            out = tmp_path / name
            assert run_cli(
                "summarize", "--bundle", str(bundle_path), "--post", str(TINY_CORPUS),
                "--config", desk_config_path, "--format", "html", "--out", str(out),
                "--stub-models",
            ) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        text = outs[0].decode("utf-8")
        assert "<mark class=\"selected\">" in text
        assert "<!DOCTYPE html>" in text

    def test_html_and_json_selections_agree(self, tmp_path, desk_config_path):
        bundle_path = self._train(tmp_path, desk_config_path)
        json_out = tmp_path / "s.json"
        html_out = tmp_path / "s.html"
        for fmt, out in (("json", json_out), ("html", html_out)):
            assert run_cli(
                "summarize", "--bundle", str(bundle_path), "--post", str(TINY_CORPUS),
                "--config", desk_config_path, "--format", fmt, "--out", str(out),
                "--stub-models",
            ) == 0
        doc = json.loads(json_out.read_text())
        html = html_out.read_text()
        marked = html.count("<mark class=\"selected\">")
        assert marked == sum(len(p["selected"]) for p in doc["posts"])

    def test_indirect_stub_models(self, tmp_path, desk_config_path):
        out = tmp_path / "ind.json"
        assert run_cli(
            "summarize", "--indirect", "--post", str(TINY_CORPUS),
            "--config", desk_config_path, "--format", "json", "--out", str(out),
            "--stub-models",
        ) == 0
        doc = json.loads(out.read_text())
        assert doc["mode"] == "indirect"

    def test_indirect_without_sidecar_or_stub_fails_clearly(self, tmp_path, monkeypatch):
        monkeypatch.delenv("ASSORT_MODEL_URL", raising=False)
        out = tmp_path / "ind.json"
        code = run_cli(
            "summarize", "--indirect", "--post", str(TINY_CORPUS),
            "--format", "json", "--out", str(out),
        )
        assert code == 4

    def test_requires_bundle_or_indirect(self, tmp_path):
        code = run_cli(
            "summarize", "--post", str(TINY_CORPUS), "--format", "json",
            "--out", str(tmp_path / "x.json"),
        )
        assert code == 3


class TestEvalAblateCurve:
    def test_eval_emits_supervised_and_lead_rows(self, tmp_path, desk_config_path, capsys):
        out = tmp_path / "report.jsonl"
        assert run_cli(
            "eval", "--corpus", str(FIXTURE_CORPUS), "--config", desk_config_path,
            "--folds", "5", "--seed", "42", "--out", str(out), "--stub-models",
        ) == 0
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert [r["variant"] for r in records] == ["supervised", "lead3"]
        table = capsys.readouterr().out
        for record in records:
            row = next(l for l in table.splitlines() if l.startswith(record["variant"]))
            assert f"{record['aggregate']['f1']:.4f}" in row

    def test_ablate_emits_five_rows(self, tmp_path, desk_config_path):
        out = tmp_path / "ablation.jsonl"
        assert run_cli(
            "ablate", "--corpus", str(FIXTURE_CORPUS), "--config", desk_config_path,
            "--folds", "5", "--seed", "42", "--out", str(out), "--stub-models",
        ) == 0
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert [r["variant"] for r in records] == [
            "full", "no_bert", "no_domain_features", "no_ensemble", "no_question_classifier",
        ]
        digests = {r["config_digest"] for r in records}
        assert len(digests) == 1  # one run id across all five variants

    def test_curve_rows(self, tmp_path, desk_config_path):
        out = tmp_path / "curve.jsonl"
        assert run_cli(
            "curve", "--corpus", str(FIXTURE_CORPUS), "--config", desk_config_path,
            "--fractions", "0.2,1.0", "--seed", "3", "--out", str(out), "--stub-models",
        ) == 0
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert [r["training_fraction"] for r in records] == [0.2, 1.0, None]
        assert records[-1]["variant"] == "indirect"


class TestIngest:
    def test_stats(self, tmp_path, capsys):
        out = tmp_path / "stats.json"
        assert run_cli("ingest", "--corpus", str(TINY_CORPUS), "--out", str(out)) == 0
        stats = json.loads(out.read_text())
        assert stats["questions"] == 2
        assert stats["posts"] == 3
        assert stats["labeled_posts"] == 3
        assert stats["posts_per_type"]["howto"] == 2


class TestUsage:
    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as err:
            run_cli("frobnicate")
        assert err.value.code == 2

    def test_unknown_config_key_exits_3(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"no_such_key": 1}')
        code = run_cli(
            "ingest", "--corpus", str(TINY_CORPUS), "--config", str(bad),
            "--out", str(tmp_path / "s.json"),
        )
        assert code == 3
