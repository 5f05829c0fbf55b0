# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
from collections.abc import Sequence

from cf4cf.common.exceptions import InvalidInput
from cf4cf.common.meta_objects import AlgoRanking
from cf4cf.common.utils import check_ranking, ranking_from_scores

logger = logging.getLogger(__name__)


def mean_rank_aggregate(rankings: Sequence[AlgoRanking]) -> AlgoRanking:
    """
    Aggregates rankings by the mean position of every algorithm (Borda count).

    Lower mean positions come first, equal means are ordered by algorithm id.

    Args:
        rankings (Sequence[AlgoRanking]): rankings over one shared algorithm universe

    Returns:
        AlgoRanking: the aggregated ranking
    """
    if not rankings:
        raise InvalidInput("cannot aggregate an empty list of rankings")
    universe = set(rankings[0])
    for ranking in rankings:
        check_ranking(ranking, min_length=1)
        if set(ranking) != universe:
            raise InvalidInput("rankings cover different algorithm sets")

    # integer position sums keep equal means exactly equal
    position_sums = dict.fromkeys(rankings[0], 0)
    for ranking in rankings:
        for position, algorithm in enumerate(ranking, start=1):
            position_sums[algorithm] += position
    n = len(rankings)
    return ranking_from_scores({a: -s / n for a, s in position_sums.items()})


def average_rank_baseline(targets: Sequence[AlgoRanking]) -> AlgoRanking:
    """
    The constant prediction of the average-rank baseline over the training targets.
    """
    return mean_rank_aggregate(targets)
