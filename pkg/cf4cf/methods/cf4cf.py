# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import math
from collections.abc import Iterable

import pandas as pd

from cf4cf.common.exceptions import IncompleteTable, InvalidInput
from cf4cf.common.meta_objects import (
    ActiveProfile,
    AlgoRanking,
    AlgorithmId,
    BaseRatingMatrix,
    Cf4cfConfig,
    DatasetId,
    LandmarkTable,
    MetaRatingMatrix,
    PerformanceTable,
    RatingScale,
)
from cf4cf.common.utils import (
    derive_seed,
    rank_position_to_rating,
    ranking_from_scores,
    ranking_to_ratings,
    ratings_to_ranking,
    seeded_rng,
)
from cf4cf.methods.collaborative import NeighbourModel

logger = logging.getLogger(__name__)

DEFAULT_SUBSAMPLE_FRACTION = 0.1


def build_meta_matrix(perf: PerformanceTable, cfg: Cf4cfConfig) -> MetaRatingMatrix:
    """
    Builds the meta rating matrix of the configured metatarget.

    Every dataset's scores are ranked, the ranking converted to ratings and,
    when cfg.n_ratings is set below M, a uniform sample of n_ratings entries is
    kept. The sample of a row depends only on the seed and the dataset id.

    Args:
        perf (PerformanceTable): performance of the training datasets
        cfg (Cf4cfConfig): pipeline configuration

    Returns:
        MetaRatingMatrix: one row per dataset, one column per algorithm

    Raises:
        IncompleteTable: if a (dataset, algorithm) score is missing
    """
    scores = perf.score_matrix(cfg.measure)
    perf.check_complete(cfg.measure)
    algorithms = list(perf.algorithms)
    m = len(algorithms)
    if m < 2:
        raise InvalidInput(f"at least 2 algorithms are needed, got {m}")
    if cfg.n_ratings is not None and cfg.n_ratings > m:
        raise InvalidInput(f"n_ratings must lie in [1, {m}], got {cfg.n_ratings}")

    rows = {}
    for dataset, row in scores.iterrows():
        ratings = ranking_to_ratings(ranking_from_scores(row.to_dict()), cfg.scale)
        if cfg.n_ratings is not None and cfg.n_ratings < m:
            rng = seeded_rng(cfg.seed, "n_ratings", dataset)
            kept = rng.choice(m, size=cfg.n_ratings, replace=False)
            ratings = {algorithms[i]: ratings[algorithms[i]] for i in sorted(kept)}
        rows[dataset] = ratings

    frame = pd.DataFrame.from_dict(rows, orient="index", dtype=float)
    frame = frame.reindex(index=list(scores.index), columns=algorithms)
    return MetaRatingMatrix(frame, cfg.scale)


def train_model(perf: PerformanceTable, cfg: Cf4cfConfig) -> NeighbourModel:
    matrix = build_meta_matrix(perf, cfg)
    logger.debug(
        "trained CF model on %d datasets, density %.2f",
        len(matrix.datasets),
        matrix.density,
    )
    return NeighbourModel(
        matrix, k=cfg.k, similarity=cfg.similarity, min_overlap=cfg.min_overlap
    )


def subsample_dataset(
    base: BaseRatingMatrix,
    fraction: float = DEFAULT_SUBSAMPLE_FRACTION,
    seed: int = 0,
) -> BaseRatingMatrix:
    """
    Draws ceil(fraction * nratings) rating triples uniformly without replacement.

    The subsample keeps the user and item universe of its source.

    Args:
        base (BaseRatingMatrix): the source dataset
        fraction (float): share of triples to keep, in (0, 1)
        seed (int): sampling seed

    Returns:
        BaseRatingMatrix: the subsample, triples in source order
    """
    if not 0 < fraction < 1:
        raise InvalidInput(f"fraction must lie in (0, 1), got {fraction}")
    if base.nratings == 0:
        raise InvalidInput("cannot subsample an empty rating matrix")
    # rounding guards against products like 0.7 * 10 = 7.000000000000001
    size = math.ceil(round(fraction * base.nratings, 9))
    rng = seeded_rng(seed, "subsample")
    kept = sorted(rng.choice(base.nratings, size=size, replace=False))
    return BaseRatingMatrix(
        base.ratings.iloc[kept].reset_index(drop=True),
        users=base.users,
        items=base.items,
    )


def landmark_ranking(
    landmarks: LandmarkTable,
    dataset: DatasetId,
    measure: str,
    algorithms: Iterable[AlgorithmId] | None = None,
) -> AlgoRanking:
    """
    Ranks the landmark scores of a dataset.

    Args:
        landmarks (LandmarkTable): landmark scores
        dataset (DatasetId): the dataset to rank
        measure (str): the metatarget measure
        algorithms (Iterable[AlgorithmId], optional): the algorithm universe, defaults to the landmark table's

    Raises:
        IncompleteTable: if a landmark score of the universe is missing
    """
    universe = list(landmarks.algorithms if algorithms is None else algorithms)
    scores = landmarks.scores(dataset, measure)
    missing = [(dataset, a) for a in universe if a not in scores]
    if missing:
        raise IncompleteTable(
            f"landmarks of {dataset!r} miss {len(missing)} algorithms for {measure!r}",
            missing=missing,
            measure=measure,
        )
    return ranking_from_scores({a: scores[a] for a in universe})


def build_active_profile(
    sl: AlgoRanking,
    n_sl: int,
    scale: RatingScale,
    seed: int,
    sampling: str = "uniform",
    positions: str = "full",
) -> ActiveProfile:
    """
    Builds the initial ratings of the active dataset from its landmark ranking.

    n_sl algorithms are sampled uniformly without replacement (or the n_sl
    best ones with sampling="top"). With positions="full" every sampled
    algorithm is rated by its position in the full landmark ranking, with
    positions="sampled" the sampled sub-ranking is converted on its own.

    Args:
        sl (AlgoRanking): the full landmark ranking
        n_sl (int): number of landmark ratings, in [1, M - 1]
        scale (RatingScale): rating scale of the model
        seed (int): sampling seed
        sampling (str): uniform or top
        positions (str): full or sampled

    Returns:
        ActiveProfile: rating of every sampled algorithm
    """
    m = len(sl)
    if m < 2:
        raise InvalidInput(f"a landmark ranking needs at least 2 algorithms, got {m}")
    if not 1 <= n_sl <= m - 1:
        raise InvalidInput(f"n_sl must lie in [1, {m - 1}], got {n_sl}")

    if sampling == "top":
        chosen = set(sl[:n_sl])
    elif sampling == "uniform":
        rng = seeded_rng(seed, "n_sl")
        chosen = {sl[i] for i in rng.choice(m, size=n_sl, replace=False)}
    else:
        raise InvalidInput(f"unknown landmark sampling {sampling!r}")

    if positions == "full":
        return {
            algorithm: rank_position_to_rating(j, m, scale)
            for j, algorithm in enumerate(sl, start=1)
            if algorithm in chosen
        }
    if positions == "sampled":
        if n_sl < 2:
            raise InvalidInput("rating a sampled sub-ranking needs n_sl >= 2")
        return ranking_to_ratings([a for a in sl if a in chosen], scale)
    raise InvalidInput(f"unknown landmark positions {positions!r}")


def cf4cf_predict(model: NeighbourModel, active: ActiveProfile) -> AlgoRanking:
    """
    Combines the active ratings with the predicted ratings of the remaining
    algorithms and ranks them. Landmark ratings win ties against predictions.
    """
    model.check_profile(active)
    predicted = model.predict_all_missing(active)
    combined = {**predicted, **active}
    return ratings_to_ranking(combined, tie_break=lambda a: (a not in active, a))


def predict_dataset(
    model: NeighbourModel,
    landmarks: LandmarkTable,
    dataset: DatasetId,
    cfg: Cf4cfConfig,
) -> AlgoRanking:
    """
    Runs the prediction stage for one dataset against a trained model.
    """
    sl = landmark_ranking(landmarks, dataset, cfg.measure, model.algorithms)
    active = build_active_profile(
        sl,
        cfg.n_sl,
        cfg.scale,
        seed=derive_seed(cfg.seed, "active", dataset),
        sampling=cfg.landmark_sampling,
        positions=cfg.landmark_positions,
    )
    return cf4cf_predict(model, active)


def cf4cf_run(
    perf: PerformanceTable,
    landmarks: LandmarkTable,
    cfg: Cf4cfConfig,
    test: Iterable[DatasetId],
    train: Iterable[DatasetId] | None = None,
) -> dict[DatasetId, AlgoRanking]:
    """
    Trains and predicts for an explicit train/test split.

    The row of a test dataset never enters the model that predicts it, even
    when it is listed in train.

    Args:
        perf (PerformanceTable): performance of the training datasets
        landmarks (LandmarkTable): landmark scores of the test datasets
        cfg (Cf4cfConfig): pipeline configuration
        test (Iterable[DatasetId]): datasets to predict
        train (Iterable[DatasetId], optional): training datasets, defaults to every dataset of perf

    Returns:
        dict[DatasetId, AlgoRanking]: predicted ranking per test dataset
    """
    train = list(perf.datasets if train is None else train)
    unknown = [d for d in train if d not in perf.datasets]
    if unknown:
        raise InvalidInput(f"training datasets {unknown} have no performance")
    cfg.check_algorithm_count(len(perf.algorithms))

    models: dict[tuple, NeighbourModel] = {}
    predictions = {}
    for dataset in test:
        rows = tuple(d for d in train if d != dataset)
        if not rows:
            raise InvalidInput(f"no training dataset left to predict {dataset!r}")
        if rows not in models:
            models[rows] = train_model(perf.subset(rows), cfg)
        predictions[dataset] = predict_dataset(models[rows], landmarks, dataset, cfg)
    return predictions
