# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import sys
from pathlib import Path

import pandas as pd
from sqlalchemy import create_engine, make_url
from tqdm import tqdm

from cf4cf.common import EvaluationReport, MetaInputs, MetaRatingMatrix, WriteOutput
from cf4cf.common.exceptions import ConfigError, InvalidInput
from cf4cf.common.meta_objects import AlgoRanking, DatasetId
from cf4cf.evaluation.harness import curve_trend, loocv, sweep
from cf4cf.metafeatures import extract_selected, extract_systematic
from cf4cf.methods import ranking_methods
from cf4cf.methods.cf4cf import build_meta_matrix, subsample_dataset
from cf4cf.methods.collaborative import similarity_measures
from cf4cf.scenario.loader_csv import (
    ExperimentConfig,
    load_meta_inputs,
    load_ratings_dir,
    write_metafeatures_csv,
    write_performance_csv,
)
from cf4cf.scenario.synthetic import generate_synthetic

file_handler = logging.FileHandler(filename="cf4cf.log", mode="w+")
stdout_handler = logging.StreamHandler(stream=sys.stdout)
handlers = [file_handler, stdout_handler]
logging.basicConfig(level=logging.INFO, handlers=handlers)

logger = logging.getLogger(__name__)


class Experiment:
    """
    Runs the commands of the toolbox against one experiment configuration.

    Every command loads what it needs from the configured paths, runs the
    matching library operation and writes its results below the output path.

    Attributes:
        config (ExperimentConfig): the experiment configuration
        ranking_methods (dict): the available metalevel methods
        similarity_measures (dict): the available row similarities of the CF model
        db (sqlalchemy.engine.base.Engine, optional): database the result tables are exported to

    Args:
        config (ExperimentConfig): the experiment configuration
        log_level (str): level of the cf4cf loggers
    """

    def __init__(self, config: ExperimentConfig, log_level: str = "INFO"):
        logging.getLogger("cf4cf").setLevel(log_level)
        self.config = config
        self.ranking_methods = ranking_methods
        self.similarity_measures = similarity_measures

        self.db = None
        if config.db_uri:
            self.db = create_engine(make_url(config.db_uri))
            logger.info("exporting result tables to %s", self.db.url)
        self._output: WriteOutput | None = None

    @property
    def output(self) -> WriteOutput:
        if self._output is None:
            self._output = WriteOutput(
                self.config.experiment_id, self.config.output_path, self.db
            )
        return self._output

    def load_inputs(self, landmarks: bool = True, metafeatures: bool = True) -> MetaInputs:
        return load_meta_inputs(self.config, landmarks=landmarks, metafeatures=metafeatures)

    def ingest(self) -> dict:
        """
        Validates every configured input and writes a summary of what was found.
        """
        inputs = self.load_inputs()
        performance = inputs.performance
        summary = {
            "datasets": len(performance.datasets),
            "algorithms": list(performance.algorithms),
            "measures": list(performance.measures),
            "missing": {
                measure: [list(pair) for pair in performance.missing(measure)]
                for measure in performance.measures
            },
        }
        if inputs.landmarks is not None:
            summary["landmark_datasets"] = len(inputs.landmarks.datasets)
            summary["datasets_without_landmarks"] = [
                d for d in performance.datasets if d not in inputs.landmarks.datasets
            ]
        if inputs.metafeatures is not None:
            summary["metafeatures"] = list(inputs.metafeatures.columns)
            summary["datasets_without_metafeatures"] = [
                d for d in performance.datasets if d not in inputs.metafeatures.index
            ]
        if self.config.ratings_path:
            ratings = load_ratings_dir(self.config.ratings_path)
            summary["rating_datasets"] = {
                d: {"nusers": b.nusers, "nitems": b.nitems, "nratings": b.nratings}
                for d, b in ratings.items()
            }
        self.output.write_json("ingest_summary.json", summary)
        return summary

    def extract_metafeatures(self, full: bool = False, subsample: bool = False) -> pd.DataFrame:
        """
        Extracts the metafeatures of every baselevel dataset in the ratings directory.

        Args:
            full (bool): extract the full systematic set instead of the selected twelve
            subsample (bool): also write the landmark subsample of every dataset
        """
        (ratings_path,) = self.config.require("ratings_path")
        ratings = load_ratings_dir(ratings_path)
        extract = extract_systematic if full else extract_selected

        rows = {}
        for dataset, base in tqdm(ratings.items(), desc="metafeatures", disable=None):
            rows[dataset] = extract(base)
            if subsample:
                sample = subsample_dataset(
                    base, self.config.subsample_fraction, self.config.seed
                )
                self.output.write_csv(
                    f"subsamples/{dataset}.csv", sample.ratings, table="subsamples"
                )
        features = pd.DataFrame.from_dict(rows, orient="index")
        features.index.name = "dataset"
        path = write_metafeatures_csv(features, self.output.export_path / "metafeatures.csv")
        logger.info("wrote %s", path)
        return features

    def train(self) -> dict[str, MetaRatingMatrix]:
        """
        Builds the meta rating matrix of every configured measure from all datasets.
        """
        inputs = self.load_inputs(landmarks=False, metafeatures=False)
        matrices = {}
        for measure in self.config.measures:
            matrix = build_meta_matrix(
                inputs.performance, self.config.cf4cf_config(measure)
            )
            self.output.write_csv(
                f"meta_matrix_{measure}.csv", matrix.to_long(), table="meta_matrix"
            )
            matrices[measure] = matrix
        return matrices

    def predict(
        self, datasets: list[DatasetId] | None = None
    ) -> dict[tuple[str, str], dict[DatasetId, AlgoRanking]]:
        """
        Ranks the algorithms for new datasets with every configured method.

        The default targets are the datasets that have landmarks or
        metafeatures but no performance rows. Every target is excluded from
        the training datasets.

        Returns:
            dict: predicted rankings per (method, measure)
        """
        inputs = self.load_inputs()
        if not datasets:
            candidates = set()
            if inputs.landmarks is not None:
                candidates |= set(inputs.landmarks.datasets)
            if inputs.metafeatures is not None:
                candidates |= set(inputs.metafeatures.index)
            datasets = sorted(candidates - set(inputs.datasets))
        if not datasets:
            raise ConfigError("no datasets to predict, pass them with --datasets")
        train = [d for d in inputs.datasets if d not in datasets]
        if not train:
            raise InvalidInput("no training datasets left")

        rows = []
        predictions = {}
        for method in self.config.methods:
            self.ranking_methods[method].validate_inputs(inputs)
            for measure in self.config.measures:
                config = self.config.evaluation_config(measure)
                model = self.ranking_methods[method](config).fit(inputs, train)
                ranked = {d: model.predict(inputs, d) for d in datasets}
                predictions[method, measure] = ranked
                rows.extend(
                    (method, measure, d, position, algorithm)
                    for d, ranking in ranked.items()
                    for position, algorithm in enumerate(ranking, start=1)
                )
        frame = pd.DataFrame(
            rows, columns=["method", "measure", "dataset", "position", "algorithm"]
        )
        self.output.write_csv("predictions.csv", frame)
        return predictions

    def evaluate(self) -> list[EvaluationReport]:
        """
        Leave-one-out evaluation of every configured method and measure.
        """
        inputs = self.load_inputs()
        reports = []
        for measure in self.config.measures:
            config = self.config.evaluation_config(measure)
            for method in self.config.methods:
                reports.append(loocv(inputs, method, config))
        self.output.write_reports(reports)
        return reports

    def sweep(self) -> list[EvaluationReport]:
        """
        Evaluates the configured methods along the configured sweep axis.
        """
        if not self.config.sweep_axis or not self.config.sweep_values:
            raise ConfigError("a sweep needs an axis and values")
        inputs = self.load_inputs()
        reports = []
        for measure in self.config.measures:
            measure_reports = sweep(
                inputs,
                self.config.sweep_axis,
                self.config.sweep_values,
                self.config.evaluation_config(measure),
                methods=self.config.methods,
            )
            if "cf4cf" in self.config.methods and len(self.config.sweep_values) > 1:
                logger.info(
                    "%s: spearman correlation of %s and mean tau %.3f",
                    measure,
                    self.config.sweep_axis,
                    curve_trend(measure_reports),
                )
            reports.extend(measure_reports)
        self.output.write_sweep(reports)
        return reports

    def synthesize(self) -> list[Path]:
        """
        Generates the configured synthetic corpus and writes its three tables.
        """
        performance, landmarks, features = generate_synthetic(self.config.synthetic)
        export_path = self.output.export_path
        paths = [
            write_performance_csv(performance, export_path / "performance.csv"),
            write_performance_csv(landmarks, export_path / "landmarks.csv"),
            write_metafeatures_csv(features, export_path / "metafeatures.csv"),
        ]
        for path in paths:
            logger.info("wrote %s", path)
        return paths
