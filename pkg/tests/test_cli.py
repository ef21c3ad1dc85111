import csv
import json

import numpy as np
import pytest

from hypersparse.cli import EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_SINGULAR, main, parse_grid
from hypersparse.experiments.gap import lambda_gap_experiment
from hypersparse.experiments.ingest import lenses_path
from hypersparse.hypergraph import Hypergraph
from hypersparse.learners import DEFAULT_GRID


def _strip_meta(doc):
    doc = dict(doc)
    doc.pop("metadata", None)
    return doc


@pytest.fixture
def problem(tmp_path):
    h = Hypergraph.from_edges(6, [[0, 1, 2], [2, 3, 4], [4, 5]])
    (tmp_path / "h.json").write_text(h.to_json())
    y = [0.0, 0.1, 0.9, 1.0, 0.2, 0.3]
    with open(tmp_path / "y.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "value"])
        w.writerows(enumerate(y))
    return tmp_path, np.array(y)


def test_parse_grid():
    assert parse_grid("1e-4..1e2:log7") == pytest.approx(list(DEFAULT_GRID))
    assert parse_grid("0.1, 1") == [1.0, 0.1]
    for bad in ("a..b:log3", "1..10:logx", "", "-1"):
        with pytest.raises(Exception):
            parse_grid(bad)


def test_train_zero_lambda_returns_labels(problem):
    d, y = problem
    assert main(["train", "--hypergraph", str(d / "h.json"), "--labels", str(d / "y.csv"),
                 "--lambda", "0", "--out", str(d / "fit.json")]) == 0
    fit = json.loads((d / "fit.json").read_text())["fits"][0]
    assert fit["f_hat"] == y.tolist()


def test_missing_labels_exit_2(problem, capsys):
    d, _ = problem
    code = main(["train", "--hypergraph", str(d / "h.json"), "--labels", str(d / "nope.csv")])
    assert code == EXIT_INPUT
    assert "cannot read labels" in capsys.readouterr().err


def test_bad_labels_and_hypergraph_exit_2(problem, tmp_path):
    d, _ = problem
    (d / "bad.csv").write_text("node_id,value\n99,1.0\n")
    assert main(["train", "--hypergraph", str(d / "h.json"), "--labels", str(d / "bad.csv")]) == EXIT_INPUT
    (d / "bad.json").write_text('{"n": 2, "edges": [{"nodes": [0, 7]}]}')
    assert main(["train", "--hypergraph", str(d / "bad.json"), "--labels", str(d / "y.csv")]) == EXIT_INPUT


def test_singular_exit_4(tmp_path):
    (tmp_path / "h.json").write_text(Hypergraph.from_edges(4, [[0, 1], [2, 3]]).to_json())
    (tmp_path / "y.csv").write_text("node_id,value\n0,0.0\n1,1.0\n")
    args = ["train", "--hypergraph", str(tmp_path / "h.json"), "--labels", str(tmp_path / "y.csv"),
            "--lambda", "0.1", "--out", str(tmp_path / "o.json")]
    assert main(args) == EXIT_SINGULAR
    assert main(args + ["--pin-unlabeled"]) == 0


def test_non_convergence_exit_3(problem, tmp_path):
    d, _ = problem
    (d / "cfg.json").write_text(json.dumps({"solver": {"max_iter": 2}}))
    code = main(["train", "--config", str(d / "cfg.json"), "--hypergraph", str(d / "h.json"),
                 "--labels", str(d / "y.csv"), "--model", "node", "--lambda", "0.5",
                 "--out", str(d / "o.json")])
    assert code == EXIT_NOT_CONVERGED


def test_flags_override_config_and_echo_round_trips(problem, capsys):
    d, _ = problem
    (d / "cfg.json").write_text(json.dumps({"model": "edge", "lambda": 0.3,
                                            "hypergraph": str(d / "h.json"),
                                            "labels": str(d / "y.csv")}))
    assert main(["train", "--config", str(d / "cfg.json"), "--model", "joint",
                 "--out", str(d / "a.json")]) == 0
    echoed = json.loads(capsys.readouterr().err.splitlines()[0])
    assert echoed["model"] == "joint" and echoed["lam"] == 0.3
    (d / "echo.json").write_text(json.dumps(echoed))
    assert main(["train", "--config", str(d / "echo.json"), "--out", str(d / "b.json")]) == 0
    a = _strip_meta(json.loads((d / "a.json").read_text()))
    b = _strip_meta(json.loads((d / "b.json").read_text()))
    a["config"].pop("out")
    b["config"].pop("out")
    assert a == b


def test_train_outputs_are_byte_identical_without_metadata(problem):
    d, _ = problem
    base = ["train", "--hypergraph", str(d / "h.json"), "--labels", str(d / "y.csv"),
            "--grid", "0.01,1", "--format", "csv"]
    main(base + ["--out", str(d / "a.csv")])
    main(base + ["--out", str(d / "b.csv")])
    assert (d / "a.csv").read_bytes() == (d / "b.csv").read_bytes()


def test_unknown_config_key(problem):
    d, _ = problem
    (d / "cfg.json").write_text(json.dumps({"modle": "edge"}))
    assert main(["train", "--config", str(d / "cfg.json")]) == EXIT_INPUT


def test_predict(problem, capsys):
    d, _ = problem
    main(["train", "--hypergraph", str(d / "h.json"), "--labels", str(d / "y.csv"),
          "--lambda", "0.4", "--out", str(d / "fit.json")])
    fit = json.loads((d / "fit.json").read_text())["fits"][0]
    capsys.readouterr()
    assert main(["predict", "--fit", str(d / "fit.json"), "--edges", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["predictions"]["new"] == pytest.approx(fit["mu_hat"][1])
    assert main(["predict", "--fit", str(d / "fit.json"), "--edges", "7"]) == EXIT_INPUT


def test_simulate_table(tmp_path):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--sweep", "n_irrelevant=1,2", "--folds", "2", "--repeats", "1",
                 "--grid", "1", "--seed", "3", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2 * 4 * 2
    assert {r["model"] for r in rows} == {"dense", "edge", "node", "joint"}
    assert set(rows[0]) == {"setting", "value", "model", "lambda", "fold", "repeat", "rmse"}
    summary = json.loads((tmp_path / "sim.summary.json").read_text())
    assert len(summary["summary"]) == 8
    again = tmp_path / "again.csv"
    main(["simulate", "--sweep", "n_irrelevant=1,2", "--folds", "2", "--repeats", "1",
          "--grid", "1", "--seed", "3", "--out", str(again)])
    assert out.read_bytes() == again.read_bytes()


def test_simulate_bad_spec_exit_2():
    assert main(["simulate", "--sweep", "band_width=0", "--repeats", "1"]) == EXIT_INPUT


def test_sparsistency_matches_gap_experiment(capsys):
    assert main(["sparsistency", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["certificate"]["gap_condition"] is True
    ref = lambda_gap_experiment()
    assert np.allclose(doc["gap_table"]["smoothness"], ref.smoothness, rtol=0, atol=1e-12)


def test_sparsistency_formula_and_rejection(tmp_path, capsys):
    (tmp_path / "h.json").write_text(Hypergraph.from_edges(20, [list(range(5))]).to_json())
    assert main(["sparsistency", "--hypergraph", str(tmp_path / "h.json"), "--gamma-r", "0.1",
                 "--gamma-i", "0.5", "--delta", "0.05"]) == 0
    cert = json.loads(capsys.readouterr().out)["certificate"]
    assert cert["lambda_max"] == (np.sqrt(np.pi) * 0.4 - 2 * np.sqrt(2) * 0.05) / (2 * np.sqrt(np.pi) * 4 * 0.25)
    assert main(["sparsistency", "--gamma-r", "0.2", "--gamma-i", "0.2", "--delta", "0"]) == EXIT_INPUT


def test_ingest_then_train(tmp_path, capsys):
    out = tmp_path / "lenses"
    assert main(["ingest", "--csv", str(lenses_path()), "--label-column", "lens_class",
                 "--id-column", "id", "--out", str(out)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert (summary["n"], summary["m"]) == (24, 9)
    rows = list(csv.DictReader((out / "labels.csv").open()))
    assert rows[0] == {"node_id": "0", "value": "3.0"}
    assert main(["train", "--hypergraph", str(out / "hypergraph.json"), "--labels",
                 str(out / "labels.csv"), "--model", "edge", "--lambda", "0.01",
                 "--out", str(tmp_path / "fit.json")]) == 0


def test_ingest_missing_label_column_exit_2(tmp_path):
    assert main(["ingest", "--csv", str(lenses_path()), "--label-column", "nope",
                 "--out", str(tmp_path)]) == EXIT_INPUT
