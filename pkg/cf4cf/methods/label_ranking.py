# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np
import pandas as pd

from cf4cf.common.exceptions import InvalidInput
from cf4cf.common.meta_objects import AlgoRanking, DatasetId, MetaDataset
from cf4cf.methods.average_rank import mean_rank_aggregate

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FeatureNormalizer:
    """
    Stored z-score statistics of the training metafeatures.

    Args:
        mean (pandas.Series): training mean per feature
        sd (pandas.Series): training population standard deviation per feature
    """

    mean: pd.Series
    sd: pd.Series

    @classmethod
    def fit(cls, features: pd.DataFrame) -> "FeatureNormalizer":
        if len(features) < 2:
            raise InvalidInput(
                f"normalization needs at least 2 training datasets, got {len(features)}"
            )
        values = features.astype(float)
        return cls(mean=values.mean(axis=0), sd=values.std(axis=0, ddof=0))

    def transform(self, features: pd.DataFrame | pd.Series):
        """
        Applies the stored statistics, features with sd 0 map to 0.
        """
        names = features.index if isinstance(features, pd.Series) else features.columns
        missing = [name for name in self.mean.index if name not in names]
        if missing:
            raise InvalidInput(f"metafeatures {missing} are missing", features=missing)
        values = features[self.mean.index].astype(float)
        # dividing by inf maps constant features to 0
        return (values - self.mean) / self.sd.where(self.sd > 0, np.inf)


def normalize_features(train: MetaDataset) -> tuple[FeatureNormalizer, MetaDataset]:
    """
    Fits a normalizer on the training metafeatures and applies it.

    Args:
        train (MetaDataset): the training datasets, at least 2

    Returns:
        tuple[FeatureNormalizer, MetaDataset]: the normalizer and the normalized training set
    """
    normalizer = FeatureNormalizer.fit(train.features)
    normalized = MetaDataset(
        features=normalizer.transform(train.features), targets=dict(train.targets)
    )
    return normalizer, normalized


class KnnLabelRanker:
    """
    k nearest neighbour label ranking in normalized metafeature space.

    The rankings of the k training datasets closest to the query, by
    Euclidean distance with ties broken by dataset id, are aggregated by
    mean rank.

    Args:
        k (int): number of neighbours
    """

    def __init__(self, k: int = 3):
        if k < 1:
            raise InvalidInput(f"k must be at least 1, got {k}")
        self.k = k
        self.normalizer: FeatureNormalizer | None = None
        self.train: MetaDataset | None = None

    def fit(self, train: MetaDataset) -> "KnnLabelRanker":
        if self.k > len(train):
            raise InvalidInput(
                f"k={self.k} exceeds the {len(train)} training datasets", k=self.k
            )
        self.normalizer, self.train = normalize_features(train)
        return self

    def neighbours(self, query: Mapping[str, float] | pd.Series) -> list[DatasetId]:
        if self.train is None or self.normalizer is None:
            raise InvalidInput("the label ranker is not fitted")
        point = self.normalizer.transform(pd.Series(query, dtype=float))
        if not np.isfinite(point.to_numpy()).all():
            raise InvalidInput("query metafeatures must be finite")
        points = self.train.features.to_numpy(dtype=float)
        distances = np.sqrt(((points - point.to_numpy()) ** 2).sum(axis=1))
        order = sorted(zip(distances, self.train.datasets))
        return [dataset for _, dataset in order[: self.k]]

    def predict(self, query: Mapping[str, float] | pd.Series) -> AlgoRanking:
        neighbours = self.neighbours(query)
        logger.debug("label ranking neighbours %s", neighbours)
        return mean_rank_aggregate([self.train.targets[d] for d in neighbours])


def knn_label_ranking(
    train: MetaDataset, query: Mapping[str, float] | pd.Series, k: int = 3
) -> AlgoRanking:
    """
    Predicts the ranking of a query dataset from its k nearest training datasets.

    Args:
        train (MetaDataset): training metafeatures and targets
        query (Mapping[str, float] | pandas.Series): metafeatures of the query
        k (int): number of neighbours, at most the number of training datasets

    Returns:
        AlgoRanking: mean-rank aggregate of the neighbour targets
    """
    return KnnLabelRanker(k).fit(train).predict(query)
