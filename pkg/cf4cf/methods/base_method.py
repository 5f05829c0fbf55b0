# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
from collections.abc import Iterable

from cf4cf.common.exceptions import ConfigError, InvalidInput
from cf4cf.common.meta_objects import (
    AlgoRanking,
    DatasetId,
    EvaluationConfig,
    MetaInputs,
)
from cf4cf.methods.average_rank import average_rank_baseline
from cf4cf.methods.cf4cf import predict_dataset, train_model
from cf4cf.methods.collaborative import NeighbourModel
from cf4cf.methods.label_ranking import KnnLabelRanker

logger = logging.getLogger(__name__)


class RankingMethod:
    """
    A metalevel method predicting the algorithm ranking of a dataset.

    A method is fitted on the training datasets of a split and then asked for
    the rankings of held-out datasets. Only the performance rows of the
    training datasets may be read during fit, predict may read the inputs
    describing the held-out dataset (landmarks, metafeatures).

    Attributes:
        config (EvaluationConfig): the evaluation configuration
        required_inputs (tuple[str, ...]): MetaInputs fields the method reads

    Args:
        config (EvaluationConfig): the evaluation configuration
    """

    name = ""
    required_inputs: tuple[str, ...] = ()

    def __init__(self, config: EvaluationConfig):
        self.config = config

    @classmethod
    def validate_inputs(cls, inputs: MetaInputs) -> None:
        missing = [field for field in cls.required_inputs if getattr(inputs, field) is None]
        if missing:
            raise ConfigError(
                f"method {cls.name!r} needs the inputs {missing}",
                method=cls.name,
                inputs=missing,
            )

    def fit(self, inputs: MetaInputs, train: Iterable[DatasetId]) -> "RankingMethod":
        raise NotImplementedError()

    def predict(self, inputs: MetaInputs, dataset: DatasetId) -> AlgoRanking:
        raise NotImplementedError()


class Cf4cfMethod(RankingMethod):
    """
    Collaborative filtering over the meta rating matrix, queried with landmark ratings.
    """

    name = "cf4cf"
    required_inputs = ("landmarks",)

    def fit(self, inputs: MetaInputs, train: Iterable[DatasetId]) -> "Cf4cfMethod":
        cfg = self.config.cf4cf
        cfg.check_algorithm_count(len(inputs.algorithms))
        self.model: NeighbourModel = train_model(inputs.performance.subset(train), cfg)
        return self

    def predict(self, inputs: MetaInputs, dataset: DatasetId) -> AlgoRanking:
        return predict_dataset(self.model, inputs.landmarks, dataset, self.config.cf4cf)


class KnnLabelRankingMethod(RankingMethod):
    """
    Metalearning with k nearest neighbour label ranking over metafeatures.
    """

    name = "mtl"
    required_inputs = ("metafeatures",)

    def fit(self, inputs: MetaInputs, train: Iterable[DatasetId]) -> "KnnLabelRankingMethod":
        train_set = inputs.meta_dataset(self.config.measure, train)
        self.ranker = KnnLabelRanker(self.config.k_lr).fit(train_set)
        return self

    def predict(self, inputs: MetaInputs, dataset: DatasetId) -> AlgoRanking:
        if dataset not in inputs.metafeatures.index:
            raise InvalidInput(f"no metafeatures for {dataset!r}", dataset=dataset)
        return self.ranker.predict(inputs.metafeatures.loc[dataset])


class AverageRankMethod(RankingMethod):
    """
    Predicts the mean-rank order of the training targets for every dataset.
    """

    name = "baseline"

    def fit(self, inputs: MetaInputs, train: Iterable[DatasetId]) -> "AverageRankMethod":
        targets = inputs.targets(self.config.measure)
        self.ranking = average_rank_baseline([targets[d] for d in train])
        return self

    def predict(self, inputs: MetaInputs, dataset: DatasetId) -> AlgoRanking:
        return self.ranking
