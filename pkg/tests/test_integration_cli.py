# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import json

import pandas as pd
import pytest

from cf4cf_cli.cli import cli

pytestmark = pytest.mark.slow


@pytest.fixture
def corpus(tmp_path):
    out = tmp_path / "corpus"
    assert cli(["synth", "--seed", "3", "--datasets", "12", "--out", str(out)]) == 0
    return out


def input_flags(corpus):
    return [
        "--performance",
        str(corpus / "performance.csv"),
        "--landmarks",
        str(corpus / "landmarks.csv"),
        "--metafeatures",
        str(corpus / "metafeatures.csv"),
    ]


def test_synth_writes_three_tables(corpus):
    assert sorted(p.name for p in corpus.iterdir()) == [
        "landmarks.csv",
        "metafeatures.csv",
        "performance.csv",
    ]
    performance = pd.read_csv(corpus / "performance.csv")
    assert performance["dataset"].nunique() == 12


def test_evaluate(corpus, tmp_path):
    out = tmp_path / "eval"
    args = ["evaluate", "--seed", "3", *input_flags(corpus), "--out", str(out)]
    assert cli(args) == 0
    payload = json.loads((out / "report.json").read_text())
    assert [r["method"] for r in payload["reports"]] == ["cf4cf", "mtl", "baseline"]
    for report in payload["reports"]:
        assert -1 <= report["mean_tau"] <= 1
        assert report["config"]["seed"] == 3
    tau = pd.read_csv(out / "tau.csv")
    assert len(tau) == 3 * 12
    assert (out / "impact.csv").is_file()


def test_evaluate_is_deterministic(corpus, tmp_path):
    for name in ["first", "second"]:
        args = ["evaluate", "--seed", "8", "--method", "cf4cf", *input_flags(corpus)]
        assert cli([*args, "--out", str(tmp_path / name)]) == 0
    for name in ["report.json", "tau.csv", "impact.csv"]:
        first = (tmp_path / "first" / name).read_bytes()
        assert first == (tmp_path / "second" / name).read_bytes()


def test_sweep(corpus, tmp_path):
    out = tmp_path / "sweep"
    args = ["sweep", "--seed", "3", *input_flags(corpus), "--out", str(out)]
    assert cli([*args, "--axis", "n_sl", "--values", "1,2,3,4"]) == 0
    curve = pd.read_csv(out / "curve.csv")
    assert (curve.groupby("method").size() == 4).all()
    assert sorted(curve["method"].unique()) == ["baseline", "cf4cf", "mtl"]
    assert (out / "sweep_report.json").is_file()


def test_missing_seed_fails_with_json_error(corpus, tmp_path, capsys):
    assert cli(["evaluate", *input_flags(corpus), "--out", str(tmp_path / "x")]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "ConfigError"
    assert "seed" in error["message"]


def test_missing_input_fails(tmp_path, capsys):
    args = ["evaluate", "--seed", "1", "--performance", str(tmp_path / "none.csv")]
    assert cli([*args, "--out", str(tmp_path / "x")]) == 1
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "ConfigError"


def test_argument_errors_exit_with_two():
    with pytest.raises(SystemExit) as e:
        cli(["evaluate", "--k", "many"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        cli(["rank"])
    assert e.value.code == 2


def test_train(corpus, tmp_path):
    out = tmp_path / "train"
    args = ["train", "--seed", "3", "--performance", str(corpus / "performance.csv")]
    assert cli([*args, "--n-ratings", "3", "--measure", "NDCG,AUC", "--out", str(out)]) == 0
    for measure in ["NDCG", "AUC"]:
        matrix = pd.read_csv(out / f"meta_matrix_{measure}.csv")
        assert (matrix.groupby("dataset").size() == 3).all()


def test_predict(corpus, tmp_path):
    out = tmp_path / "predict"
    args = ["predict", "--seed", "3", *input_flags(corpus), "--datasets", "ds000,ds001"]
    assert cli([*args, "--out", str(out)]) == 0
    predictions = pd.read_csv(out / "predictions.csv")
    assert len(predictions) == 3 * 2 * 5
    assert sorted(predictions["dataset"].unique()) == ["ds000", "ds001"]
    assert set(predictions["position"]) == {1, 2, 3, 4, 5}


def test_metafeatures_with_subsamples(tmp_path):
    ratings = tmp_path / "ratings"
    ratings.mkdir()
    for name, offset in [("ml_small", 0), ("books_small", 2)]:
        rows = [
            f"u{u},i{(u * 3 + j) % 9},{(u + j + offset) % 5 + 1}"
            for u in range(8)
            for j in range(4)
        ]
        (ratings / f"{name}.csv").write_text("user,item,rating\n" + "\n".join(rows) + "\n")
    out = tmp_path / "mf"
    args = ["metafeatures", "--seed", "3", "--ratings", str(ratings), "--out", str(out)]
    assert cli([*args, "--subsample", "--fraction", "0.5"]) == 0
    features = pd.read_csv(out / "metafeatures.csv", index_col="dataset")
    assert list(features.index) == ["books_small", "ml_small"]
    assert features.shape[1] == 12
    sample = pd.read_csv(out / "subsamples" / "ml_small.csv")
    assert len(sample) == 16

    assert cli([*args, "--full", "--out", str(tmp_path / "full")]) == 0
    full = pd.read_csv(tmp_path / "full" / "metafeatures.csv", index_col="dataset")
    assert full.shape[1] == 74


def test_ingest(corpus, tmp_path):
    out = tmp_path / "ingest"
    assert cli(["ingest", "--seed", "1", *input_flags(corpus), "--out", str(out)]) == 0
    summary = json.loads((out / "ingest_summary.json").read_text())
    assert summary["datasets"] == 12
    assert summary["measures"] == ["AUC", "NDCG"]
    assert summary["missing"] == {"AUC": [], "NDCG": []}


def test_config_file(corpus, tmp_path):
    (corpus / "config.yaml").write_text(
        "small:\n"
        "  seed: 4\n"
        "  performance_path: performance.csv\n"
        "  landmarks_path: landmarks.csv\n"
        "  methods: [cf4cf, baseline]\n"
        "  n_sl: 2\n"
        "other:\n"
        "  seed: 5\n"
    )
    out = tmp_path / "config_run"
    args = ["evaluate", "--config", str(corpus / "config.yaml"), "-c", "small"]
    assert cli([*args, "--k", "3", "--out", str(out)]) == 0
    payload = json.loads((out / "report.json").read_text())
    assert [r["method"] for r in payload["reports"]] == ["cf4cf", "baseline"]
    config = payload["reports"][0]["config"]
    assert (config["seed"], config["n_sl"], config["k"]) == (4, 2, 3)
