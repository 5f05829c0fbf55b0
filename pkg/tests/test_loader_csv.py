# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import pytest

from cf4cf.common.exceptions import ConfigError, DuplicateEntry, InvalidInput, ParseError
from cf4cf.scenario.loader_csv import (
    ExperimentConfig,
    load_base_ratings_csv,
    load_config,
    load_landmarks_csv,
    load_meta_inputs,
    load_metafeatures_csv,
    load_performance_csv,
    load_ratings_dir,
    make_experiment_config,
    write_metafeatures_csv,
    write_performance_csv,
)
from cf4cf.scenario.synthetic import SyntheticSpec, generate_synthetic

HEADER = "dataset,algorithm,measure,score\n"


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_performance_row(tmp_path):
    path = write(tmp_path / "perf.csv", HEADER + "ml100k,BPRMF,NDCG,0.43\n")
    table = load_performance_csv(path)
    assert table.datasets == ("ml100k",)
    assert table.algorithms == ("BPRMF",)
    assert table.measures == ("NDCG",)
    assert table.scores("ml100k", "NDCG") == {"BPRMF": 0.43}


def test_duplicate_row_reports_second_line(tmp_path):
    path = write(
        tmp_path / "perf.csv",
        HEADER + "ml100k,BPRMF,NDCG,0.43\nml100k,BPRMF,NDCG,0.41\n",
    )
    with pytest.raises(DuplicateEntry) as e:
        load_performance_csv(path)
    assert e.value.line == 3
    assert e.value.context["key"] == ["ml100k", "BPRMF", "NDCG"]


@pytest.mark.parametrize("score", ["NaN", "abc", "inf", ""])
def test_non_finite_score(tmp_path, score):
    path = write(
        tmp_path / "perf.csv",
        HEADER + "ml100k,BPRMF,NDCG,0.43\nml1m,BPRMF,NDCG," + score + "\n",
    )
    with pytest.raises(ParseError) as e:
        load_performance_csv(path)
    assert e.value.line == 3
    assert e.value.path == str(path)


def test_wrong_header(tmp_path):
    path = write(tmp_path / "perf.csv", "dataset,algo,measure,score\nml100k,BPRMF,NDCG,0.4\n")
    with pytest.raises(ParseError) as e:
        load_performance_csv(path)
    assert e.value.line == 1


def test_empty_id(tmp_path):
    path = write(tmp_path / "perf.csv", HEADER + "ml100k,BPRMF,NDCG,0.4\n ,BPRMF,NDCG,0.3\n")
    with pytest.raises(ParseError) as e:
        load_performance_csv(path)
    assert e.value.line == 3


def test_blank_lines_keep_line_numbers(tmp_path):
    path = write(
        tmp_path / "perf.csv",
        HEADER + "ml100k,BPRMF,NDCG,0.4\n\nml1m,BPRMF,NDCG,x\n",
    )
    with pytest.raises(ParseError) as e:
        load_performance_csv(path)
    assert e.value.line == 4

    path = write(tmp_path / "ok.csv", HEADER + "ml100k,BPRMF,NDCG,0.4\n\nml1m,BPRMF,NDCG,0.2\n")
    assert load_performance_csv(path).datasets == ("ml100k", "ml1m")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_performance_csv(tmp_path / "nothing.csv")
    with pytest.raises(ConfigError):
        load_ratings_dir(tmp_path / "nothing")


def test_performance_round_trip(tmp_path, clustered_corpus):
    performance, landmarks, _ = clustered_corpus
    write_performance_csv(performance, tmp_path / "perf.csv")
    write_performance_csv(landmarks, tmp_path / "landmarks.csv")
    assert load_performance_csv(tmp_path / "perf.csv") == performance
    loaded = load_landmarks_csv(tmp_path / "landmarks.csv")
    assert type(loaded).__name__ == "LandmarkTable"
    assert loaded == landmarks


def test_base_ratings(tmp_path):
    path = write(tmp_path / "r.csv", "user,item,rating\nu1,i1,4\nu1,i2,3.5\nu2,i1,1\n")
    base = load_base_ratings_csv(path)
    assert (base.nusers, base.nitems, base.nratings) == (2, 2, 3)
    assert base.ratings["rating"].tolist() == [4.0, 3.5, 1.0]

    write(path, "user,item,rating\nu1,i1,4\nu2,i1,1\nu1,i1,2\n")
    with pytest.raises(DuplicateEntry) as e:
        load_base_ratings_csv(path)
    assert e.value.line == 4

    write(path, "user,item,rating\n")
    assert load_base_ratings_csv(path).nratings == 0


def test_ratings_dir_uses_file_stems(tmp_path):
    write(tmp_path / "ml100k.csv", "user,item,rating\nu1,i1,4\n")
    write(tmp_path / "jester.csv", "user,item,rating\nu1,i1,-2.5\nu2,i1,3\n")
    datasets = load_ratings_dir(tmp_path)
    assert list(datasets) == ["jester", "ml100k"]
    assert datasets["jester"].nratings == 2

    with pytest.raises(ConfigError):
        load_ratings_dir(tmp_path / "ml100k.csv")


def test_metafeatures_round_trip(tmp_path, clustered_corpus):
    _, _, features = clustered_corpus
    write_metafeatures_csv(features, tmp_path / "mf.csv")
    loaded = load_metafeatures_csv(tmp_path / "mf.csv")
    assert list(loaded.index) == list(features.index)
    assert list(loaded.columns) == list(features.columns)
    assert (loaded.to_numpy() == features.to_numpy()).all()


def test_metafeatures_invalid(tmp_path):
    path = write(tmp_path / "mf.csv", "dataset,nusers,sparsity\nml100k,943,0.93\nml1m,NaN,0.95\n")
    with pytest.raises(ParseError) as e:
        load_metafeatures_csv(path)
    assert e.value.line == 3

    write(path, "name,nusers\nml100k,943\n")
    with pytest.raises(ParseError):
        load_metafeatures_csv(path)

    write(path, "dataset\nml100k\n")
    with pytest.raises(ParseError):
        load_metafeatures_csv(path)


def test_load_config(tmp_path):
    write(
        tmp_path / "config.yaml",
        "base:\n"
        "  seed: 3\n"
        "  performance_path: performance.csv\n"
        "other:\n"
        "  seed: 4\n"
        "  measures: [NDCG, AUC]\n",
    )
    params = load_config(tmp_path / "config.yaml")
    assert params["seed"] == 3
    assert params["experiment_id"] == "base"
    assert params["performance_path"] == str(tmp_path / "performance.csv")

    other = load_config(tmp_path / "config.yaml", "other")
    assert other["measures"] == ["NDCG", "AUC"]

    with pytest.raises(ConfigError):
        load_config(tmp_path / "config.yaml", "missing")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_load_config_invalid_yaml(tmp_path):
    write(tmp_path / "config.yaml", "base:\n  seed: [1, 2\n")
    with pytest.raises(ParseError):
        load_config(tmp_path / "config.yaml")


def test_make_experiment_config():
    config = make_experiment_config(
        {
            "seed": "7",
            "measure": "NDCG,AUC",
            "n_ratings": "all",
            "n_sl": "2",
            "method": "cf4cf,baseline",
            "sweep": {"axis": "n_sl", "values": "1,2,3"},
            "synthetic": {"n_datasets": 12},
        }
    )
    assert config.seed == 7
    assert config.measures == ("NDCG", "AUC")
    assert config.n_ratings is None
    assert config.n_sl == 2
    assert config.methods == ("cf4cf", "baseline")
    assert config.sweep_axis == "n_sl"
    assert config.sweep_values == (1, 2, 3)
    assert config.synthetic == SyntheticSpec(n_datasets=12, seed=7)

    cf = config.cf4cf_config("AUC")
    assert cf.measure == "AUC"
    assert cf.seed == 7
    assert config.evaluation_config("NDCG").k_lr == 3


def test_make_experiment_config_invalid():
    with pytest.raises(ConfigError):
        make_experiment_config({})
    with pytest.raises(ConfigError):
        make_experiment_config({"seed": 1, "methods": "random_forest"})
    with pytest.raises(ConfigError):
        make_experiment_config({"seed": 1, "n_sl": 0})
    with pytest.raises(ConfigError):
        make_experiment_config({"seed": 1, "n_ratings": "many"})
    with pytest.raises(ConfigError):
        make_experiment_config({"seed": 1, "sweep": {"axis": "k"}})
    with pytest.raises(ConfigError):
        make_experiment_config({"seed": 1, "scale_min": 5, "scale_max": 1})
    with pytest.raises(ConfigError):
        make_experiment_config({"seed": 1, "synthetic": {"n_clusters": 0}})


def test_require_paths(tmp_path):
    config = ExperimentConfig(seed=1, performance_path=str(tmp_path / "perf.csv"))
    with pytest.raises(ConfigError):
        config.require("performance_path")
    with pytest.raises(ConfigError):
        config.require("landmarks_path")


def test_load_meta_inputs(tmp_path):
    performance, landmarks, features = generate_synthetic(SyntheticSpec(n_datasets=6, seed=2))
    write_performance_csv(performance, tmp_path / "perf.csv")
    write_performance_csv(landmarks, tmp_path / "landmarks.csv")
    write_metafeatures_csv(features, tmp_path / "mf.csv")
    config = ExperimentConfig(
        seed=1,
        performance_path=str(tmp_path / "perf.csv"),
        landmarks_path=str(tmp_path / "landmarks.csv"),
        metafeatures_path=str(tmp_path / "mf.csv"),
        measures=("AUC",),
    )
    inputs = load_meta_inputs(config)
    assert inputs.performance == performance
    assert inputs.landmarks == landmarks
    assert list(inputs.metafeatures.index) == list(features.index)
    assert load_meta_inputs(config, landmarks=False).landmarks is None

    other = landmarks.data.assign(algorithm=landmarks.data["algorithm"].str.upper())
    other.to_csv(tmp_path / "landmarks.csv", index=False)
    with pytest.raises(InvalidInput):
        load_meta_inputs(config)


def test_load_meta_inputs_unknown_measure(tmp_path):
    write(tmp_path / "perf.csv", HEADER + "ml100k,BPRMF,NDCG,0.4\nml100k,ALS,NDCG,0.3\n")
    config = ExperimentConfig(
        seed=1, performance_path=str(tmp_path / "perf.csv"), measures=("AUC",)
    )
    with pytest.raises(InvalidInput):
        load_meta_inputs(config)
    loaded = load_meta_inputs(ExperimentConfig(seed=1, performance_path=str(tmp_path / "perf.csv")))
    assert loaded.performance.scores("ml100k", "NDCG") == {"ALS": 0.3, "BPRMF": 0.4}
