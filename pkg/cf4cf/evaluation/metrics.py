# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import math
from collections.abc import Iterable, Mapping

import numpy as np

from cf4cf.common.exceptions import IncompleteTable, InvalidInput
from cf4cf.common.meta_objects import AlgoRanking, DatasetId, PerformanceTable
from cf4cf.common.utils import check_ranking


def kendall_tau(r1: AlgoRanking, r2: AlgoRanking) -> float:
    """
    Kendall's tau-a between two total orders over the same algorithms.

    Args:
        r1 (AlgoRanking): first ranking
        r2 (AlgoRanking): second ranking

    Returns:
        float: (concordant - discordant) / (M (M - 1) / 2)

    Raises:
        InvalidInput: if the rankings cover different algorithms
    """
    check_ranking(r1)
    check_ranking(r2)
    if set(r1) != set(r2):
        raise InvalidInput(
            "rankings cover different algorithm sets",
            only_first=sorted(set(r1) - set(r2)),
            only_second=sorted(set(r2) - set(r1)),
        )
    m = len(r1)
    position = {algorithm: i for i, algorithm in enumerate(r2)}
    x = np.arange(m)
    y = np.array([position[algorithm] for algorithm in r1])
    signs = np.sign(x[:, None] - x[None, :]) * np.sign(y[:, None] - y[None, :])
    # every pair is counted twice, on both sides of the diagonal
    return int(signs.sum()) / (m * (m - 1))


def oracle_best_score(
    perf: PerformanceTable, measure: str, datasets: Iterable[DatasetId]
) -> float:
    """
    Mean over the datasets of the best score any algorithm reaches.
    """
    datasets = list(datasets)
    if not datasets:
        raise InvalidInput("no datasets to average over")
    perf.check_complete(measure, datasets)
    best = [max(perf.scores(d, measure).values()) for d in datasets]
    return math.fsum(best) / len(best)


def baselevel_impact(
    predicted: Mapping[DatasetId, AlgoRanking],
    perf: PerformanceTable,
    measure: str,
    t: int,
) -> float:
    """
    Mean over datasets of the best true score among the first t predicted algorithms.

    Args:
        predicted (Mapping[DatasetId, AlgoRanking]): predicted ranking per dataset
        perf (PerformanceTable): the true baselevel performance
        measure (str): the measure scoring the recommendation
        t (int): number of recommended algorithms, in [1, M]

    Returns:
        float: the mean best score
    """
    m = len(perf.algorithms)
    if not 1 <= t <= m:
        raise InvalidInput(f"t must lie in [1, {m}], got {t}")
    if not predicted:
        raise InvalidInput("no predictions to score")
    best = []
    for dataset in sorted(predicted):
        scores = perf.scores(dataset, measure)
        top = predicted[dataset][:t]
        missing = [(dataset, a) for a in top if a not in scores]
        if missing:
            raise IncompleteTable(
                f"no {measure} score for {missing[0]}", missing=missing, measure=measure
            )
        best.append(max(scores[a] for a in top))
    return math.fsum(best) / len(best)


def impact_curve(
    predicted: Mapping[DatasetId, AlgoRanking], perf: PerformanceTable, measure: str
) -> dict[int, float]:
    """
    Baselevel impact for every t from 1 to M.
    """
    return {
        t: baselevel_impact(predicted, perf, measure, t)
        for t in range(1, len(perf.algorithms) + 1)
    }
