import json
from pathlib import Path

import pytest

from querykg.cli import main

from pipeline_util import run_pipeline

GOLDEN = Path(__file__).parent / "golden"


class TestPipelineGolden:
    def test_full_pipeline_matches_golden_bytes(self, tmp_path):
        artifacts = run_pipeline(tmp_path)
        assert GOLDEN.is_dir(), "run tests/regenerate_golden.py first"
        for rel, produced in sorted(artifacts.items()):
            expected = GOLDEN / rel
            assert expected.exists(), f"missing golden file {rel}"
            assert produced.read_bytes() == expected.read_bytes(), f"{rel} differs"


class TestCliErrors:
    def test_missing_corpus_exits_nonzero(self, tmp_path, capsys):
        rc = main(
            ["ingest", "--store", str(tmp_path / "s.db"), "--corpus", "/nonexistent.jsonl"]
        )
        assert rc == 2
        err = capsys.readouterr().err
        assert err.startswith("error: ")
        assert "\n" not in err.strip()

    def test_index_before_ingest_fails(self, tmp_path, capsys):
        rc = main(["index", "--store", str(tmp_path / "s.db")])
        assert rc == 2

    def test_entity_qe_requires_names(self, tmp_path, capsys):
        rc = main(
            [
                "search",
                "--store", str(tmp_path / "s.db"),
                "--output", str(tmp_path / "out.txt"),
                "--entity-qe",
            ]
        )
        assert rc == 2
        assert "entity-qrels" in capsys.readouterr().err


class TestConfigFile:
    def test_config_supplies_store(self, tmp_path, capsys):
        fx = tmp_path / "fx"
        rc = main(["gen-fixture", "--output-dir", str(fx), "--seed", "1"])
        assert rc == 0
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"store": str(tmp_path / "s.db")}))
        rc = main(
            [
                "--config", str(cfg),
                "ingest",
                "--store", str(tmp_path / "s.db"),
                "--corpus", str(fx / "corpus.jsonl"),
            ]
        )
        assert rc == 0

    def test_effective_config_echoed(self, tmp_path):
        rc = main(["gen-fixture", "--output-dir", str(tmp_path / "fx"), "--seed", "2"])
        assert rc == 0
        echoed = json.loads((tmp_path / "fx" / "effective-config.json").read_text())
        assert echoed["seed"] == 2
        assert echoed["command"] == "gen-fixture"


class TestEvalRunCommand:
    def test_eval_run_tsv_output(self, tmp_path, capsys):
        run = tmp_path / "run.txt"
        run.write_text("t1 Q0 a 1 2.0 sys\nt1 Q0 b 2 1.0 sys\n")
        qrels = tmp_path / "qrels.txt"
        qrels.write_text("t1 0 a 1\n")
        rc = main(
            ["eval-run", "--run", str(run), "--qrels", str(qrels), "--measures", "map"]
        )
        assert rc == 0
        out = capsys.readouterr().out
        assert "map\t1.0000" in out
