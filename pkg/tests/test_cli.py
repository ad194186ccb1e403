import json
import subprocess
import sys

import pytest

from hlmkit.cli import main
from hlmkit.data import reference_performance_path

CORPUS_LINES = [
    {"id": "d1", "text": "The cat sat on the mat. It was warm."},
    {"id": "d2", "text": "Quantum entanglement characterizes nonclassical correlations."},
    {"id": "d3", "text": "Dogs run fast. Cats sleep a lot. Birds sing."},
    {"id": "d4", "text": "The committee ratified the comprehensive modernization proposal."},
    {"id": "d5", "text": "I like tea. You like milk."},
    {"id": "d6", "text": "The hypothesis survived repeated falsification attempts."},
]


def write_corpus(tmp_path, name="corpus.jsonl", lines=CORPUS_LINES):
    path = tmp_path / name
    path.write_text("".join(json.dumps(obj) + "\n" for obj in lines))
    return str(path)


def write_transfer_cube(tmp_path):
    header = "task,criterion,model,train_level,eval_level,metric,value,higher_is_better\n"
    rows = []
    perf = {"easy": 0.9, "medium": 0.8, "hard": 0.7}
    for task in ("t1", "t2"):
        for tr in ("easy", "medium", "hard"):
            for ev in ("easy", "medium", "hard"):
                rows.append(f"{task},c1,m1,{tr},{ev},accuracy,{perf[tr]},true")
            rows.append(f"{task},c1,m1,{tr},full,accuracy,{perf[tr]},true")
    path = tmp_path / "transfer_cube.csv"
    path.write_text(header + "\n".join(rows) + "\n")
    return str(path)


def run_twice_and_compare(argv, out_path):
    assert main(argv) == 0
    first = out_path.read_bytes()
    assert main(argv) == 0
    assert out_path.read_bytes() == first


class TestPipeline:
    def test_full_pipeline(self, tmp_path):
        corpus = write_corpus(tmp_path)
        model = tmp_path / "model.json"
        surp = tmp_path / "surp.jsonl"
        scores = tmp_path / "scores.jsonl"
        split = tmp_path / "split.json"
        sched = tmp_path / "sched.json"

        assert main(["lm-train", "--corpus", corpus, "--order", "2",
                     "-o", str(model), "--validate"]) == 0
        assert main(["surprisal", "--corpus", corpus, "--model", str(model),
                     "-o", str(surp), "--validate"]) == 0
        assert main(["score", "--corpus", corpus, "--criterion", "uid_sl",
                     "--model", str(model), "-o", str(scores), "--validate"]) == 0
        assert main(["split", "--scores", str(scores), "-o", str(split), "--validate"]) == 0
        assert main(["schedule", "--split", str(split), "--order", "easy_to_hard",
                     "-o", str(sched), "--validate"]) == 0

        split_data = json.loads(split.read_text())
        assert sorted(
            split_data["easy"] + split_data["medium"] + split_data["hard"]
        ) == [f"d{i}" for i in range(1, 7)]
        sched_data = json.loads(sched.read_text())
        assert len(sched_data["sequence"]) == 6

    def test_score_with_imported_surprisals(self, tmp_path):
        corpus = write_corpus(tmp_path)
        model = tmp_path / "model.json"
        surp = tmp_path / "surp.jsonl"
        out_lm = tmp_path / "a.jsonl"
        out_imported = tmp_path / "b.jsonl"
        assert main(["lm-train", "--corpus", corpus, "-o", str(model)]) == 0
        assert main(["surprisal", "--corpus", corpus, "--model", str(model),
                     "-o", str(surp)]) == 0
        assert main(["score", "--corpus", corpus, "--criterion", "uid_var",
                     "--model", str(model), "-o", str(out_lm)]) == 0
        assert main(["score", "--corpus", corpus, "--criterion", "uid_var",
                     "--surprisals", str(surp), "-o", str(out_imported)]) == 0
        assert out_lm.read_bytes() == out_imported.read_bytes()

    def test_score_neural(self, tmp_path):
        corpus = write_corpus(tmp_path)
        neural = tmp_path / "neural.jsonl"
        neural.write_text("".join(
            json.dumps({"id": f"d{i}", "score": float(i), "higher_is_harder": True}) + "\n"
            for i in range(1, 7)
        ))
        out = tmp_path / "scores.jsonl"
        assert main(["score", "--corpus", corpus, "--criterion", "neural",
                     "--neural-scores", str(neural), "-o", str(out)]) == 0
        rows = [json.loads(line) for line in out.read_text().splitlines()]
        assert [r["value"] for r in rows] == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]

    def test_flesch_score_cardinality(self, tmp_path):
        corpus = write_corpus(tmp_path, lines=CORPUS_LINES[:3])
        out = tmp_path / "scores.jsonl"
        assert main(["score", "--corpus", corpus, "--criterion", "flesch",
                     "-o", str(out)]) == 0
        assert len(out.read_text().splitlines()) == 3


class TestHlmCommand:
    def test_bundled_reference_default(self, tmp_path):
        report = tmp_path / "report.json"
        hm_csv = tmp_path / "hm.csv"
        hm_svg = tmp_path / "hm.svg"
        assert main(["hlm", "-o", str(report), "--heatmap-csv", str(hm_csv),
                     "--heatmap-svg", str(hm_svg), "--validate"]) == 0
        data = json.loads(report.read_text())
        assert len(data["cells"]) == 72
        wt2 = {
            (c["model"], c["criterion"]): c["value"]
            for c in data["cells"] if c["task"] == "WT2"
        }
        for model in ("BERT", "LSTM"):
            assert wt2[(model, "uid_sl")] == pytest.approx(1.0, abs=1e-3)
        assert hm_svg.read_text().startswith("<svg")
        header = hm_csv.read_text().splitlines()[0]
        assert header.startswith("model,criterion,")

    def test_explicit_cube_and_ddof(self, tmp_path):
        report0 = tmp_path / "r0.json"
        report1 = tmp_path / "r1.json"
        cube = str(reference_performance_path())
        assert main(["hlm", "--cube", cube, "-o", str(report0)]) == 0
        assert main(["hlm", "--cube", cube, "--std-ddof", "1", "-o", str(report1)]) == 0
        d0 = json.loads(report0.read_text())
        d1 = json.loads(report1.read_text())
        assert d0["std_ddof"] == 0 and d1["std_ddof"] == 1
        assert d0["cells"] != d1["cells"]

    def test_idempotent(self, tmp_path):
        report = tmp_path / "report.json"
        run_twice_and_compare(["hlm", "-o", str(report)], report)


class TestConvergeCommand:
    def write_log(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("step,value\n1,0.5\n2,0.9\n3,0.9\n4,0.9\n")
        return str(path)

    def test_with_flag(self, tmp_path):
        log = self.write_log(tmp_path)
        out = tmp_path / "conv.json"
        assert main(["converge", "--log", log, "--higher-is-better", "-o", str(out)]) == 0
        data = json.loads(out.read_text())
        assert data["ratio"] == pytest.approx(0.5)
        assert data["convergent_step"] == 2

    def test_with_manifest(self, tmp_path):
        log = self.write_log(tmp_path)
        manifest = tmp_path / "run.json"
        manifest.write_text('{"higher_is_better": true}\n')
        out = tmp_path / "conv.json"
        assert main(["converge", "--log", log, "--manifest", str(manifest),
                     "-o", str(out), "--validate"]) == 0
        assert json.loads(out.read_text())["ratio"] == pytest.approx(0.5)

    def test_direction_required(self, tmp_path, capsys):
        log = self.write_log(tmp_path)
        assert main(["converge", "--log", log, "-o", str(tmp_path / "x.json")]) == 2
        assert "direction" in capsys.readouterr().err

    def test_epsilon_flag(self, tmp_path):
        path = tmp_path / "log.csv"
        path.write_text("step,value\n1,300\n2,200\n3,199.9\n")
        out = tmp_path / "conv.json"
        assert main(["converge", "--log", str(path), "--lower-is-better",
                     "--epsilon", "0.0001", "-o", str(out)]) == 0
        assert json.loads(out.read_text())["ratio"] == pytest.approx(1.0)


class TestTransferCommand:
    def test_synthetic_cube(self, tmp_path):
        cube = write_transfer_cube(tmp_path)
        out = tmp_path / "matrix.json"
        out_csv = tmp_path / "matrix.csv"
        assert main(["transfer", "--cube", cube, "-o", str(out),
                     "--csv", str(out_csv), "--validate"]) == 0
        data = json.loads(out.read_text())
        assert data["group_count"] == 2
        for ev in ("easy", "medium", "hard"):
            total = sum(data["matrix"][tr][ev] for tr in ("easy", "medium", "hard"))
            assert total == pytest.approx(6.0, abs=1e-9)
        assert out_csv.read_text().splitlines()[0] == "train_level,easy,medium,hard"

    def test_idempotent(self, tmp_path):
        cube = write_transfer_cube(tmp_path)
        out = tmp_path / "matrix.json"
        run_twice_and_compare(["transfer", "--cube", cube, "-o", str(out)], out)


class TestReportCommand:
    def test_renders_both_svgs(self, tmp_path):
        report = tmp_path / "report.json"
        assert main(["hlm", "-o", str(report)]) == 0
        log = tmp_path / "log.csv"
        log.write_text("step,value\n1,0.5\n2,0.7\n3,0.9\n")
        heatmap = tmp_path / "heatmap.svg"
        curves = tmp_path / "curves.svg"
        assert main(["report", "--hlm-report", str(report), "--heatmap-out", str(heatmap),
                     "--curves", str(log), "--labels", "baseline",
                     "--curves-out", str(curves), "--validate"]) == 0
        assert heatmap.read_text().startswith("<svg")
        assert "baseline" in curves.read_text()

    def test_requires_some_work(self, tmp_path, capsys):
        assert main(["report"]) == 2
        assert "nothing to render" in capsys.readouterr().err


class TestDeterminism:
    def test_random_schedule_reruns_identically(self, tmp_path):
        corpus = write_corpus(tmp_path)
        scores = tmp_path / "scores.jsonl"
        split = tmp_path / "split.json"
        assert main(["score", "--corpus", corpus, "--criterion", "flesch",
                     "-o", str(scores)]) == 0
        assert main(["split", "--scores", str(scores), "-o", str(split)]) == 0
        out = tmp_path / "sched.json"
        run_twice_and_compare(
            ["schedule", "--split", str(split), "--order", "random", "--seed", "7",
             "-o", str(out)],
            out,
        )

    def test_score_rerun_is_byte_identical(self, tmp_path):
        corpus = write_corpus(tmp_path)
        out = tmp_path / "scores.jsonl"
        run_twice_and_compare(
            ["score", "--corpus", corpus, "--criterion", "flesch", "-o", str(out)], out
        )


class TestErrorPaths:
    def test_empty_corpus_exit_2(self, tmp_path, capsys):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        code = main(["score", "--corpus", str(empty), "--criterion", "flesch",
                     "-o", str(tmp_path / "x.jsonl")])
        assert code == 2
        assert "EmptyCorpus" in capsys.readouterr().err

    def test_uid_without_surprisal_source_exit_2(self, tmp_path, capsys):
        corpus = write_corpus(tmp_path)
        code = main(["score", "--corpus", corpus, "--criterion", "uid_sl",
                     "-o", str(tmp_path / "x.jsonl")])
        assert code == 2
        assert "MissingSurprisal" in capsys.readouterr().err

    def test_missing_input_exit_3(self, tmp_path, capsys):
        code = main(["score", "--corpus", str(tmp_path / "nope.jsonl"),
                     "--criterion", "flesch", "-o", str(tmp_path / "x.jsonl")])
        assert code == 3
        assert "not found" in capsys.readouterr().err

    def test_malformed_cube_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "cube.csv"
        bad.write_text("task,model\nx,y\n")
        code = main(["hlm", "--cube", str(bad), "-o", str(tmp_path / "r.json")])
        assert code == 2
        assert "ParseError" in capsys.readouterr().err

    def test_no_subcommand_exit_2(self, capsys):
        assert main([]) == 2


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_win(self, tmp_path):
        corpus = write_corpus(tmp_path)
        model = tmp_path / "model.json"
        assert main(["lm-train", "--corpus", corpus, "-o", str(model)]) == 0
        config = tmp_path / "hlmkit.ini"
        config.write_text("[score]\nk = 2.0\n")

        def uid_values(extra):
            out = tmp_path / "out.jsonl"
            assert main(["score", "--corpus", corpus, "--criterion", "uid_sl",
                         "--model", str(model), "-o", str(out)] + extra) == 0
            return [json.loads(l)["value"] for l in out.read_text().splitlines()]

        plain = uid_values([])
        via_config = uid_values(["--config", str(config)])
        flag_wins = uid_values(["--config", str(config), "--k", "1.25"])
        assert via_config != plain
        assert flag_wins == plain

    def test_env_var_config(self, tmp_path, monkeypatch):
        corpus = write_corpus(tmp_path)
        model = tmp_path / "model.json"
        assert main(["lm-train", "--corpus", corpus, "-o", str(model)]) == 0
        config = tmp_path / "hlmkit.ini"
        config.write_text("[defaults]\nk = 3.0\n")
        out_env = tmp_path / "env.jsonl"
        monkeypatch.setenv("HLMKIT_CONFIG", str(config))
        assert main(["score", "--corpus", corpus, "--criterion", "uid_sl",
                     "--model", str(model), "-o", str(out_env)]) == 0
        monkeypatch.delenv("HLMKIT_CONFIG")
        out_plain = tmp_path / "plain.jsonl"
        assert main(["score", "--corpus", corpus, "--criterion", "uid_sl",
                     "--model", str(model), "-o", str(out_plain)]) == 0
        assert out_env.read_bytes() != out_plain.read_bytes()

    def test_missing_config_file_exit_3(self, tmp_path, capsys):
        corpus = write_corpus(tmp_path)
        code = main(["score", "--corpus", corpus, "--criterion", "flesch",
                     "-o", str(tmp_path / "x.jsonl"), "--config",
                     str(tmp_path / "nope.ini")])
        assert code == 3


class TestModuleEntryPoint:
    def test_python_dash_m(self, tmp_path):
        corpus = write_corpus(tmp_path)
        out = tmp_path / "scores.jsonl"
        proc = subprocess.run(
            [sys.executable, "-m", "hlmkit", "score", "--corpus", corpus,
             "--criterion", "flesch", "-o", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
