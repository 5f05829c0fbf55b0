# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import multiprocessing
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from functools import partial

import pandas as pd
from scipy import stats
from tqdm import tqdm

from cf4cf.common.exceptions import ConfigError, InvalidInput
from cf4cf.common.meta_objects import (
    AlgoRanking,
    DatasetId,
    EvaluationConfig,
    EvaluationReport,
    MetaInputs,
)
from cf4cf.evaluation.metrics import impact_curve, kendall_tau
from cf4cf.methods import RankingMethod, ranking_methods

logger = logging.getLogger(__name__)

SWEEP_AXES = ("n_ratings", "n_sl")


def get_method(method: str) -> type[RankingMethod]:
    if method not in ranking_methods:
        raise ConfigError(
            f"unknown method {method!r}, available: {list(ranking_methods)}",
            method=method,
        )
    return ranking_methods[method]


def predict_fold(
    inputs: MetaInputs, method: str, config: EvaluationConfig, dataset: DatasetId
) -> AlgoRanking:
    """
    Trains a method on every dataset but one and predicts the held-out one.

    Args:
        inputs (MetaInputs): the metalevel inputs
        method (str): name of the method
        config (EvaluationConfig): the evaluation configuration
        dataset (DatasetId): the held-out dataset

    Returns:
        AlgoRanking: the predicted ranking
    """
    train = [d for d in inputs.datasets if d != dataset]
    model = get_method(method)(config).fit(inputs, train)
    return model.predict(inputs, dataset)


def fold_context() -> multiprocessing.context.BaseContext | None:
    """
    Start method of the fold workers, fork where available. Workers must not
    import the modules that open cf4cf.log again.
    """
    if "fork" in multiprocessing.get_all_start_methods():
        return multiprocessing.get_context("fork")
    return None


def loocv(
    inputs: MetaInputs, method: str, config: EvaluationConfig
) -> EvaluationReport:
    """
    Leave-one-out cross-validation of a method at the dataset level.

    Folds run in worker processes when config.parallel is set. Predictions are
    assembled in dataset order either way, so the report does not depend on
    the scheduling.

    Args:
        inputs (MetaInputs): the metalevel inputs
        method (str): cf4cf, mtl or baseline
        config (EvaluationConfig): the evaluation configuration

    Returns:
        EvaluationReport: per-dataset tau and impact curves
    """
    datasets = list(inputs.datasets)
    if len(datasets) < 3:
        raise InvalidInput(
            f"leave-one-out needs at least 3 datasets, got {len(datasets)}"
        )
    get_method(method).validate_inputs(inputs)
    truth = inputs.targets(config.measure)

    fold = partial(predict_fold, inputs, method, config)
    if config.parallel:
        with ProcessPoolExecutor(mp_context=fold_context()) as executor:
            rankings = list(executor.map(fold, datasets))
    else:
        rankings = [
            fold(dataset)
            for dataset in tqdm(
                datasets, desc=f"{method} {config.measure}", leave=False, disable=None
            )
        ]
    predictions = dict(zip(datasets, rankings))

    tau = {d: kendall_tau(predictions[d], truth[d]) for d in datasets}
    impact = {}
    for measure in inputs.performance.measures:
        if inputs.performance.missing(measure):
            logger.warning("skipping the %s impact curve, scores are missing", measure)
            continue
        impact[measure] = impact_curve(predictions, inputs.performance, measure)

    report = EvaluationReport(
        method=method,
        measure=config.measure,
        config=config.snapshot(),
        tau=tau,
        impact=impact,
        predictions=predictions,
    )
    logger.info(
        "%s on %s: mean tau %.4f over %d datasets",
        method,
        config.measure,
        report.mean_tau,
        len(datasets),
    )
    return report


def check_sweep_values(axis: str, values: Sequence[int], m: int) -> None:
    if axis not in SWEEP_AXES:
        raise InvalidInput(f"unknown sweep axis {axis!r}, available: {list(SWEEP_AXES)}")
    if not values:
        raise InvalidInput("a sweep needs at least one value")
    upper = m - 1 if axis == "n_sl" else m
    outside = [v for v in values if not 1 <= v <= upper]
    if outside:
        raise InvalidInput(
            f"{axis} values {outside} outside [1, {upper}]", axis=axis, values=outside
        )


def sweep(
    inputs: MetaInputs,
    axis: str,
    values: Sequence[int],
    config: EvaluationConfig,
    methods: Iterable[str] = ("cf4cf",),
) -> list[EvaluationReport]:
    """
    Runs one leave-one-out evaluation per value of a CF4CF configuration field.

    Methods that do not read the swept field are evaluated at every value too,
    which gives reference lines on the same axis.

    Args:
        inputs (MetaInputs): the metalevel inputs
        axis (str): n_ratings or n_sl
        values (Sequence[int]): the values to evaluate
        config (EvaluationConfig): the configuration every other field is taken from
        methods (Iterable[str]): the methods to evaluate

    Returns:
        list[EvaluationReport]: one report per value and method, in that order
    """
    methods = list(methods)
    for method in methods:
        get_method(method)
    check_sweep_values(axis, values, len(inputs.algorithms))

    configs = [replace(config, cf4cf=replace(config.cf4cf, **{axis: v})) for v in values]

    reports = []
    for value, cfg in zip(tqdm(values, desc=f"sweep {axis}", disable=None), configs):
        for method in methods:
            report = loocv(inputs, method, cfg)
            report.axis = axis
            report.axis_value = value
            reports.append(report)
    return reports


def curve_frame(reports: Iterable[EvaluationReport]) -> pd.DataFrame:
    """
    Mean tau per sweep value, method and measure.
    """
    return pd.DataFrame(
        [report.curve_point() for report in reports],
        columns=["axis_value", "method", "measure", "mean_tau"],
    )


def tau_frame(reports: Iterable[EvaluationReport]) -> pd.DataFrame:
    rows = [
        (report.method, report.measure, dataset, tau)
        for report in reports
        for dataset, tau in report.tau.items()
    ]
    return pd.DataFrame(rows, columns=["method", "measure", "dataset", "tau"])


def impact_frame(reports: Iterable[EvaluationReport]) -> pd.DataFrame:
    """
    Impact curves of every report, one row per t. The measure column names
    the measure scoring the recommendations, target the metatarget predicted.
    """
    rows = [
        (t, report.method, measure, value, report.measure)
        for report in reports
        for measure, curve in report.impact.items()
        for t, value in curve.items()
    ]
    return pd.DataFrame(
        rows, columns=["t", "method", "measure", "mean_best_score", "target"]
    )


def curve_trend(reports: Iterable[EvaluationReport], method: str = "cf4cf") -> float:
    """
    Spearman correlation between the swept values and the mean tau of a method.
    """
    points = [(r.axis_value, r.mean_tau) for r in reports if r.method == method]
    if len(points) < 2:
        raise InvalidInput("a trend needs at least two sweep values")
    x, y = zip(*points)
    return float(stats.spearmanr(x, y).statistic)
