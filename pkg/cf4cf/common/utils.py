# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import math
import zlib
from collections.abc import Callable, Iterable, Mapping, Sequence
from typing import Any

import numpy as np

from cf4cf.common.exceptions import InvalidInput
from cf4cf.common.meta_objects import AlgoRanking, AlgorithmId, RatingScale

logger = logging.getLogger(__name__)

DEFAULT_SCALE = RatingScale()


def ranking_from_scores(
    scores: Mapping[AlgorithmId, float],
    tie_break: Callable[[AlgorithmId], Any] | None = None,
) -> AlgoRanking:
    """
    Orders algorithms by descending score.

    Equal scores are ordered by the tie_break key, which defaults to the
    algorithm id itself, so the result is fully deterministic.

    Args:
        scores (Mapping[AlgorithmId, float]): score of every algorithm
        tie_break (Callable, optional): sort key applied to tied algorithms

    Returns:
        AlgoRanking: the algorithms, best first

    Raises:
        InvalidInput: if scores is empty or holds a non-finite score
    """
    if not scores:
        raise InvalidInput("cannot rank an empty score map")
    for algorithm, score in scores.items():
        if not math.isfinite(score):
            raise InvalidInput(
                f"score of {algorithm} is not finite: {score}", algorithm=algorithm
            )
    key = tie_break or (lambda algorithm: algorithm)
    return tuple(sorted(scores, key=lambda a: (-float(scores[a]), key(a))))


def check_ranking(ranking: Sequence[AlgorithmId], min_length: int = 2) -> None:
    if len(ranking) < min_length:
        raise InvalidInput(
            f"a ranking needs at least {min_length} algorithms, got {len(ranking)}"
        )
    if len(set(ranking)) != len(ranking):
        raise InvalidInput(f"ranking {list(ranking)} repeats an algorithm")


def rank_position_to_rating(
    position: int, m: int, scale: RatingScale = DEFAULT_SCALE
) -> float:
    """
    Maps the 1-based position of an algorithm in a ranking of m algorithms
    linearly onto the rating scale.

    The first position maps to s_max and the last to s_min, both exactly.

    Args:
        position (int): 1-based rank position
        m (int): number of ranked algorithms
        scale (RatingScale): the target scale

    Returns:
        float: the rating
    """
    if m < 2:
        raise InvalidInput(f"a ranking needs at least 2 algorithms, got {m}")
    if not 1 <= position <= m:
        raise InvalidInput(f"position {position} outside [1, {m}]")
    if position == 1:
        return scale.s_max
    if position == m:
        return scale.s_min
    return scale.span * (m - position) / (m - 1) + scale.s_min


def ranking_to_ratings(
    ranking: Sequence[AlgorithmId], scale: RatingScale = DEFAULT_SCALE
) -> dict[AlgorithmId, float]:
    """
    Converts a ranking into ratings, strictly decreasing with the position.
    """
    check_ranking(ranking)
    m = len(ranking)
    return {
        algorithm: rank_position_to_rating(position, m, scale)
        for position, algorithm in enumerate(ranking, start=1)
    }


def ratings_to_ranking(
    ratings: Mapping[AlgorithmId, float],
    tie_break: Callable[[AlgorithmId], Any] | None = None,
) -> AlgoRanking:
    """
    Orders algorithms by descending rating, ties by the tie_break key.
    """
    return ranking_from_scores(ratings, tie_break)


def seed_sequence(seed: int, *keys: Any) -> np.random.SeedSequence:
    """
    Derives a seed sequence from a master seed and any number of keys.

    String keys are folded in through their CRC32, so the stream of one
    dataset does not depend on which other datasets are present.
    """
    entropy = [int(seed)]
    for key in keys:
        if isinstance(key, int):
            entropy.append(key)
        else:
            entropy.append(zlib.crc32(str(key).encode("utf-8")))
    return np.random.SeedSequence(entropy)


def seeded_rng(seed: int, *keys: Any) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *keys))


def derive_seed(seed: int, *keys: Any) -> int:
    return int(seed_sequence(seed, *keys).generate_state(1, dtype=np.uint64)[0])


def parse_int_list(values: str | Iterable) -> list[int]:
    """
    Parses "1,2,3" or an iterable of numbers into a list of ints.
    """
    if isinstance(values, str):
        values = [v for v in values.replace(" ", "").split(",") if v]
    try:
        return [int(v) for v in values]
    except (TypeError, ValueError) as e:
        raise InvalidInput(f"expected a list of integers, got {values!r}") from e


def parse_name_list(values: str | Iterable[str] | None) -> tuple[str, ...]:
    if values is None:
        return ()
    if isinstance(values, str):
        values = values.split(",")
    return tuple(v.strip() for v in values if v.strip())
