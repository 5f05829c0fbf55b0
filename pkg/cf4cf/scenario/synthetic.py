# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from cf4cf.common.exceptions import InvalidInput
from cf4cf.common.meta_objects import (
    AlgoRanking,
    AlgorithmId,
    LandmarkTable,
    PerformanceTable,
)
from cf4cf.common.utils import seeded_rng
from cf4cf.evaluation.metrics import kendall_tau
from cf4cf.metafeatures.extraction import SELECTED_METAFEATURES

logger = logging.getLogger(__name__)

# score of the best and the worst ranked algorithm per measure
SCORE_LEVELS = {
    "NDCG": (0.6, 0.2),
    "AUC": (0.95, 0.55),
}
DEFAULT_SCORE_LEVELS = (0.9, 0.5)


@dataclass(frozen=True)
class SyntheticSpec:
    """
    Describes a synthetic metalevel corpus.

    Datasets are assigned round robin to clusters, every cluster has its own
    ground truth ranking and its own metafeature centroid.

    Args:
        n_datasets (int): number of datasets
        n_algorithms (int): number of algorithms M
        n_clusters (int): number of clusters, at most n_datasets
        landmark_noise (float): sd of the Gaussian noise added to the scores to get landmarks
        score_noise (float): sd of the Gaussian noise added to the cluster base scores
        seed (int): seed of the generator
        feature_noise (float): sd of the Gaussian jitter around the metafeature centroids
        measures (tuple[str, ...]): the measures scores are generated for
    """

    n_datasets: int = 40
    n_algorithms: int = 5
    n_clusters: int = 2
    landmark_noise: float = 0.05
    score_noise: float = 0.01
    seed: int = 0
    feature_noise: float = 0.5
    measures: tuple[str, ...] = ("NDCG", "AUC")

    def __post_init__(self):
        if self.n_datasets < 1:
            raise InvalidInput(f"n_datasets must be at least 1, got {self.n_datasets}")
        if self.n_algorithms < 2:
            raise InvalidInput(f"n_algorithms must be at least 2, got {self.n_algorithms}")
        if not 1 <= self.n_clusters <= self.n_datasets:
            raise InvalidInput(
                f"n_clusters must lie in [1, {self.n_datasets}], got {self.n_clusters}"
            )
        if self.n_clusters > math.factorial(self.n_algorithms):
            raise InvalidInput(
                f"{self.n_algorithms} algorithms allow at most "
                f"{math.factorial(self.n_algorithms)} distinct cluster rankings"
            )
        for name in ["landmark_noise", "score_noise", "feature_noise"]:
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidInput(f"{name} must be finite and non-negative, got {value}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.measures or len(set(self.measures)) != len(self.measures):
            raise InvalidInput(f"measures must be unique and non-empty, got {self.measures}")

    @property
    def dataset_ids(self) -> list[str]:
        width = max(3, len(str(self.n_datasets - 1)))
        return [f"ds{i:0{width}d}" for i in range(self.n_datasets)]

    @property
    def algorithm_ids(self) -> list[AlgorithmId]:
        width = max(2, len(str(self.n_algorithms - 1)))
        return [f"alg{j:0{width}d}" for j in range(self.n_algorithms)]


def cluster_rankings(
    algorithms: list[AlgorithmId],
    n_clusters: int,
    rng: np.random.Generator,
    candidates: int = 32,
) -> list[AlgoRanking]:
    """
    Draws distinct cluster rankings, greedily spread out in Kendall distance.

    Every new ranking is the random candidate whose highest tau to the
    rankings chosen so far is lowest.
    """
    chosen: list[AlgoRanking] = [tuple(str(a) for a in rng.permutation(algorithms))]
    while len(chosen) < n_clusters:
        pool = [tuple(str(a) for a in rng.permutation(algorithms)) for _ in range(candidates)]
        pool = [ranking for ranking in pool if ranking not in chosen]
        if not pool:
            continue
        chosen.append(
            min(pool, key=lambda r: max(kendall_tau(r, other) for other in chosen))
        )
    return chosen


def generate_synthetic(
    spec: SyntheticSpec,
) -> tuple[PerformanceTable, LandmarkTable, pd.DataFrame]:
    """
    Generates performance scores, landmarks and metafeatures of a clustered corpus.

    Dataset scores are the base scores of the cluster ranking plus Gaussian
    score noise, landmarks add Gaussian landmark noise on top, metafeatures
    are the cluster centroid plus Gaussian jitter. All draws come from one
    generator seeded by spec.seed.

    Args:
        spec (SyntheticSpec): the corpus description

    Returns:
        tuple[PerformanceTable, LandmarkTable, pandas.DataFrame]: performance, landmarks and
        metafeatures indexed by dataset
    """
    rng = seeded_rng(spec.seed, "synthetic")
    datasets = spec.dataset_ids
    algorithms = spec.algorithm_ids
    m = spec.n_algorithms

    rankings = cluster_rankings(algorithms, spec.n_clusters, rng)
    centroids = rng.normal(0.0, 3.0, size=(spec.n_clusters, len(SELECTED_METAFEATURES)))

    performance, landmarks = [], []
    for measure in spec.measures:
        best, worst = SCORE_LEVELS.get(measure, DEFAULT_SCORE_LEVELS)
        levels = np.linspace(best, worst, m)
        for i, dataset in enumerate(datasets):
            ranking = rankings[i % spec.n_clusters]
            base = {algorithm: levels[j] for j, algorithm in enumerate(ranking)}
            score_noise = rng.normal(0.0, spec.score_noise, size=m)
            landmark_noise = rng.normal(0.0, spec.landmark_noise, size=m)
            for j, algorithm in enumerate(algorithms):
                score = float(base[algorithm] + score_noise[j])
                performance.append((dataset, algorithm, measure, score))
                landmarks.append(
                    (dataset, algorithm, measure, float(score + landmark_noise[j]))
                )

    jitter = rng.normal(
        0.0, spec.feature_noise, size=(spec.n_datasets, len(SELECTED_METAFEATURES))
    )
    clusters = [i % spec.n_clusters for i in range(spec.n_datasets)]
    features = pd.DataFrame(
        centroids[clusters] + jitter,
        index=pd.Index(datasets, name="dataset"),
        columns=list(SELECTED_METAFEATURES),
    )
    logger.info(
        "generated %d datasets, %d algorithms in %d clusters",
        spec.n_datasets,
        m,
        spec.n_clusters,
    )
    return (
        PerformanceTable.from_records(performance, spec.measures),
        LandmarkTable.from_records(landmarks, spec.measures),
        features,
    )
