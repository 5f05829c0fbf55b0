# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import math
from collections.abc import Callable, Mapping

import numpy as np

from cf4cf.common.exceptions import InvalidInput
from cf4cf.common.meta_objects import (
    AlgorithmId,
    DatasetId,
    MetaRatingMatrix,
    RatingScale,
)

logger = logging.getLogger(__name__)

Row = Mapping[AlgorithmId, float]


def cosine_similarity(x: np.ndarray, y: np.ndarray) -> float:
    norm = math.sqrt(float(np.dot(x, x)) * float(np.dot(y, y)))
    if norm == 0:
        return 0.0
    return float(np.clip(float(np.dot(x, y)) / norm, -1.0, 1.0))


def pearson_similarity(x: np.ndarray, y: np.ndarray) -> float:
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return 0.0
    # cosine of the mean-centred vectors
    return cosine_similarity(x - x.mean(), y - y.mean())


similarity_measures: dict[str, Callable[[np.ndarray, np.ndarray], float]] = {
    "cosine": cosine_similarity,
    "pearson": pearson_similarity,
}


def check_similarity(kind: str) -> None:
    if kind not in similarity_measures:
        raise InvalidInput(
            f"unknown similarity {kind!r}, available: {list(similarity_measures)}",
            similarity=kind,
        )


def row_similarity(
    u: Row, v: Row, kind: str = "cosine", min_overlap: int = 2
) -> float:
    """
    Similarity of two sparse rating rows computed over their co-rated algorithms only.

    Args:
        u (Row): first rating row
        v (Row): second rating row
        kind (str): cosine or pearson
        min_overlap (int): co-rated algorithms needed, fewer give a similarity of 0

    Returns:
        float: similarity in [-1, 1], 0 for degenerate rows
    """
    check_similarity(kind)
    shared = sorted(u.keys() & v.keys())
    if len(shared) < max(min_overlap, 1):
        return 0.0
    x = np.fromiter((u[a] for a in shared), dtype=float, count=len(shared))
    y = np.fromiter((v[a] for a in shared), dtype=float, count=len(shared))
    return similarity_measures[kind](x, y)


class NeighbourModel:
    """
    User-based nearest neighbour model over a meta rating matrix.

    Datasets play the role of users and algorithms the role of items. The
    model predicts the missing ratings of an active dataset from the k
    training rows most similar to its known ratings.

    Attributes:
        matrix (MetaRatingMatrix): the training matrix
        k (int): neighbourhood size
        similarity (str): name of the row similarity
        min_overlap (int): co-rated algorithms needed for a nonzero similarity

    Args:
        matrix (MetaRatingMatrix): the training matrix
        k (int): neighbourhood size
        similarity (str): name of the row similarity
        min_overlap (int): co-rated algorithms needed for a nonzero similarity
    """

    def __init__(
        self,
        matrix: MetaRatingMatrix,
        k: int = 5,
        similarity: str = "cosine",
        min_overlap: int = 2,
    ):
        if k < 1:
            raise InvalidInput(f"k must be at least 1, got {k}")
        if min_overlap < 1:
            raise InvalidInput(f"min_overlap must be at least 1, got {min_overlap}")
        check_similarity(similarity)

        self.matrix = matrix
        self.k = k
        self.similarity = similarity
        self.min_overlap = min_overlap

        self.rows: dict[DatasetId, dict[AlgorithmId, float]] = {
            dataset: matrix.row(dataset) for dataset in matrix.datasets
        }
        self.item_means: dict[AlgorithmId, float] = {}
        for algorithm in matrix.algorithms:
            rated = [row[algorithm] for row in self.rows.values() if algorithm in row]
            if rated:
                self.item_means[algorithm] = math.fsum(rated) / len(rated)

    @property
    def scale(self) -> RatingScale:
        return self.matrix.scale

    @property
    def algorithms(self) -> tuple[AlgorithmId, ...]:
        return self.matrix.algorithms

    def check_profile(self, active: Row) -> None:
        if not active:
            raise InvalidInput("the active profile is empty")
        unknown = [a for a in active if a not in self.algorithms]
        if unknown:
            raise InvalidInput(
                f"active profile rates unknown algorithms {unknown}", algorithms=unknown
            )
        outside = [a for a, r in active.items() if not self.scale.contains(r)]
        if outside:
            raise InvalidInput(
                f"active ratings outside [{self.scale.s_min}, {self.scale.s_max}] for {outside}",
                algorithms=outside,
            )

    def similarities(self, active: Row) -> dict[DatasetId, float]:
        """
        Similarity of the active profile to every training row.
        """
        return {
            dataset: row_similarity(active, row, self.similarity, self.min_overlap)
            for dataset, row in self.rows.items()
        }

    def neighbours(
        self,
        target: AlgorithmId,
        similarities: Mapping[DatasetId, float],
    ) -> list[tuple[DatasetId, float]]:
        """
        Returns the k most similar rows rating the target, ties by dataset id.
        Rows with a similarity of exactly 0 never count as neighbours.
        """
        candidates = [
            (dataset, sim)
            for dataset, sim in similarities.items()
            if sim != 0.0 and target in self.rows[dataset]
        ]
        candidates.sort(key=lambda pair: (-pair[1], pair[0]))
        return candidates[: self.k]

    def fallback(self, target: AlgorithmId) -> float:
        if target in self.item_means:
            return self.item_means[target]
        return self.scale.midpoint

    def _predict(
        self, target: AlgorithmId, similarities: Mapping[DatasetId, float]
    ) -> float:
        neighbours = self.neighbours(target, similarities)
        weight = math.fsum(abs(sim) for _, sim in neighbours)
        if weight == 0:
            logger.debug("no neighbour rates %s, using the fallback", target)
            return self.fallback(target)
        weighted = math.fsum(sim * self.rows[d][target] for d, sim in neighbours)
        return self.scale.clamp(weighted / weight)

    def predict_rating(self, active: Row, target: AlgorithmId) -> float:
        """
        Predicts the rating of one algorithm the active profile does not rate.

        Args:
            active (Row): the known ratings of the active dataset
            target (AlgorithmId): the algorithm to predict

        Returns:
            float: predicted rating clamped to the scale

        Raises:
            InvalidInput: if the profile is invalid, the target is unknown or already rated
        """
        self.check_profile(active)
        if target not in self.algorithms:
            raise InvalidInput(f"unknown algorithm {target!r}", algorithm=target)
        if target in active:
            raise InvalidInput(
                f"algorithm {target!r} is already rated by the active profile",
                algorithm=target,
            )
        return self._predict(target, self.similarities(active))

    def predict_all_missing(self, active: Row) -> dict[AlgorithmId, float]:
        """
        Predicts every algorithm of the model that the active profile does not rate.
        """
        self.check_profile(active)
        similarities = self.similarities(active)
        return {
            algorithm: self._predict(algorithm, similarities)
            for algorithm in self.algorithms
            if algorithm not in active
        }


def predict_rating(model: NeighbourModel, active: Row, target: AlgorithmId) -> float:
    return model.predict_rating(active, target)


def predict_all_missing(model: NeighbourModel, active: Row) -> dict[AlgorithmId, float]:
    return model.predict_all_missing(active)
