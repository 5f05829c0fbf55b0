# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import math
from collections.abc import Iterable, Mapping
from dataclasses import asdict, dataclass, field
from typing import TypedDict

import numpy as np
import pandas as pd

from cf4cf.common.exceptions import DuplicateEntry, IncompleteTable, InvalidInput

AlgorithmId = str
DatasetId = str
# total order over the algorithm set, best first
AlgoRanking = tuple[AlgorithmId, ...]
# initial ratings of the active dataset on the model's scale
ActiveProfile = dict[AlgorithmId, float]
# ordered map metafeature name -> value
MetafeatureVector = dict[str, float]

PERFORMANCE_COLUMNS = ["dataset", "algorithm", "measure", "score"]
RATING_COLUMNS = ["user", "item", "rating"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RatingScale:
    """
    Describes the rating scale S = [s_min, s_max] rankings are converted to.

    Args:
        s_min (float): the lowest rating, given to the last ranked algorithm
        s_max (float): the highest rating, given to the first ranked algorithm
    """

    s_min: float = 1.0
    s_max: float = 5.0

    def __post_init__(self):
        if not (math.isfinite(self.s_min) and math.isfinite(self.s_max)):
            raise InvalidInput(
                f"rating scale bounds must be finite, got [{self.s_min}, {self.s_max}]"
            )
        if not self.s_min < self.s_max:
            raise InvalidInput(
                f"rating scale needs s_min < s_max, got [{self.s_min}, {self.s_max}]"
            )

    @property
    def span(self) -> float:
        return self.s_max - self.s_min

    @property
    def midpoint(self) -> float:
        return (self.s_min + self.s_max) / 2

    def contains(self, rating: float) -> bool:
        return self.s_min <= rating <= self.s_max

    def clamp(self, rating: float) -> float:
        return min(max(rating, self.s_min), self.s_max)


class PerformanceTable:
    """
    Scores of algorithms on datasets, one row per (dataset, algorithm, measure).

    The table is treated as immutable after construction. Score matrices per
    measure are pivoted lazily and cached.

    Args:
        data (pandas.DataFrame): frame with the columns dataset, algorithm, measure and score.
        measures (Iterable[str], optional): the declared measure set. Defaults to the measures present in data.

    Raises:
        InvalidInput: if ids are empty, scores are not finite or a measure is not declared.
        DuplicateEntry: if a (dataset, algorithm, measure) triple occurs twice.
    """

    def __init__(self, data: pd.DataFrame, measures: Iterable[str] | None = None):
        missing_columns = [c for c in PERFORMANCE_COLUMNS if c not in data.columns]
        if missing_columns:
            raise InvalidInput(
                f"performance data lacks the columns {missing_columns}",
                columns=missing_columns,
            )
        data = data.loc[:, PERFORMANCE_COLUMNS].copy()
        for column in ["dataset", "algorithm", "measure"]:
            data[column] = data[column].astype(str)
        data["score"] = data["score"].astype(float)

        for column in ["dataset", "algorithm", "measure"]:
            if (data[column].str.len() == 0).any():
                raise InvalidInput(f"empty {column} id in performance data")
        if not np.isfinite(data["score"].to_numpy()).all():
            raise InvalidInput("performance scores must be finite")

        duplicated = data.duplicated(["dataset", "algorithm", "measure"])
        if duplicated.any():
            row = data[duplicated].iloc[0]
            key = [row["dataset"], row["algorithm"], row["measure"]]
            raise DuplicateEntry(f"duplicate performance entry {key}", key=key)

        present = sorted(data["measure"].unique())
        self.measures: tuple[str, ...] = (
            tuple(sorted(set(measures))) if measures is not None else tuple(present)
        )
        undeclared = [m for m in present if m not in self.measures]
        if undeclared:
            raise InvalidInput(
                f"measures {undeclared} are not declared", measures=undeclared
            )

        self.data = data.sort_values(["dataset", "algorithm", "measure"]).reset_index(
            drop=True
        )
        self.datasets: tuple[DatasetId, ...] = tuple(sorted(data["dataset"].unique()))
        self.algorithms: tuple[AlgorithmId, ...] = tuple(
            sorted(data["algorithm"].unique())
        )
        self._score_matrices: dict[str, pd.DataFrame] = {}

    @classmethod
    def from_records(
        cls, records: Iterable[tuple], measures: Iterable[str] | None = None
    ):
        return cls(pd.DataFrame(list(records), columns=PERFORMANCE_COLUMNS), measures)

    @classmethod
    def from_scores(
        cls, scores: Mapping[DatasetId, Mapping[AlgorithmId, float]], measure: str
    ):
        """
        Builds a single-measure table from a nested mapping dataset -> algorithm -> score.
        """
        return cls.from_records(
            (dataset, algorithm, measure, score)
            for dataset, row in scores.items()
            for algorithm, score in row.items()
        )

    def __len__(self) -> int:
        return len(self.data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PerformanceTable):
            return NotImplemented
        return self.measures == other.measures and self.data.equals(other.data)

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(datasets={len(self.datasets)}, "
            f"algorithms={len(self.algorithms)}, measures={self.measures})"
        )

    def check_measure(self, measure: str) -> None:
        if measure not in self.measures:
            raise InvalidInput(
                f"unknown measure {measure!r}, available: {list(self.measures)}",
                measure=measure,
            )

    def score_matrix(self, measure: str) -> pd.DataFrame:
        """
        Returns the dataset x algorithm score matrix of a measure, NaN where no score exists.
        """
        self.check_measure(measure)
        if measure not in self._score_matrices:
            rows = self.data[self.data["measure"] == measure]
            matrix = rows.pivot(index="dataset", columns="algorithm", values="score")
            self._score_matrices[measure] = matrix.reindex(
                index=list(self.datasets), columns=list(self.algorithms)
            )
        return self._score_matrices[measure]

    def scores(self, dataset: DatasetId, measure: str) -> dict[AlgorithmId, float]:
        matrix = self.score_matrix(measure)
        if dataset not in matrix.index:
            return {}
        row = matrix.loc[dataset].dropna()
        return {str(a): float(s) for a, s in row.items()}

    def missing(
        self, measure: str, datasets: Iterable[DatasetId] | None = None
    ) -> list[tuple[DatasetId, AlgorithmId]]:
        """
        Lists the (dataset, algorithm) pairs without a score for the measure.
        Datasets absent from the table count as missing every algorithm.
        """
        matrix = self.score_matrix(measure)
        datasets = list(self.datasets if datasets is None else datasets)
        missing = []
        for dataset in datasets:
            if dataset not in matrix.index:
                missing.extend((dataset, a) for a in self.algorithms)
                continue
            row = matrix.loc[dataset]
            missing.extend((dataset, str(a)) for a in row.index[row.isna()])
        return missing

    def check_complete(
        self, measure: str, datasets: Iterable[DatasetId] | None = None
    ) -> None:
        missing = self.missing(measure, datasets)
        if missing:
            raise IncompleteTable(
                f"{len(missing)} scores missing for measure {measure!r}, first: {missing[0]}",
                missing=missing,
                measure=measure,
            )

    def subset(self, datasets: Iterable[DatasetId]):
        """
        Returns a table of the same type restricted to the given datasets.
        """
        datasets = set(datasets)
        return type(self)(
            self.data[self.data["dataset"].isin(datasets)], measures=self.measures
        )

    def without(self, dataset: DatasetId):
        return self.subset(d for d in self.datasets if d != dataset)


class LandmarkTable(PerformanceTable):
    """
    Performance scores computed on dataset subsamples, same schema as :class:`PerformanceTable`.
    """


class BaseRatingMatrix:
    """
    Sparse user x item x rating triples of one baselevel dataset.

    The user and item universes default to the ids appearing in the ratings,
    subsamples inherit the universes of their source matrix.

    Args:
        ratings (pandas.DataFrame): frame with the columns user, item and rating.
        users (Iterable, optional): the user universe.
        items (Iterable, optional): the item universe.
    """

    def __init__(
        self,
        ratings: pd.DataFrame,
        users: Iterable | None = None,
        items: Iterable | None = None,
    ):
        ratings = ratings.loc[:, RATING_COLUMNS].copy()
        ratings["rating"] = ratings["rating"].astype(float)
        if not np.isfinite(ratings["rating"].to_numpy()).all():
            raise InvalidInput("ratings must be finite")
        duplicated = ratings.duplicated(["user", "item"])
        if duplicated.any():
            row = ratings[duplicated].iloc[0]
            key = [str(row["user"]), str(row["item"])]
            raise DuplicateEntry(f"duplicate rating for {key}", key=key)

        self.ratings = ratings.reset_index(drop=True)
        self.users = tuple(
            sorted(ratings["user"].unique()) if users is None else users
        )
        self.items = tuple(
            sorted(ratings["item"].unique()) if items is None else items
        )
        unknown_users = set(ratings["user"]) - set(self.users)
        unknown_items = set(ratings["item"]) - set(self.items)
        if unknown_users or unknown_items:
            raise InvalidInput("ratings reference users or items outside the universe")

    @property
    def nusers(self) -> int:
        return len(self.users)

    @property
    def nitems(self) -> int:
        return len(self.items)

    @property
    def nratings(self) -> int:
        return len(self.ratings)

    @property
    def sparsity(self) -> float:
        cells = self.nusers * self.nitems
        if cells == 0:
            return 1.0
        return 1.0 - self.nratings / cells

    def __len__(self) -> int:
        return self.nratings

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(users={self.nusers}, items={self.nitems}, "
            f"ratings={self.nratings})"
        )


@dataclass(frozen=True, eq=False)
class MetaRatingMatrix:
    """
    The dataset x algorithm rating matrix the CF metamodel is trained on.

    Args:
        ratings (pandas.DataFrame): index are dataset ids, columns algorithm ids, NaN marks a missing rating
        scale (RatingScale): the scale every present rating lies on
    """

    ratings: pd.DataFrame
    scale: RatingScale = field(default_factory=RatingScale)

    def __post_init__(self):
        if self.ratings.index.has_duplicates or self.ratings.columns.has_duplicates:
            raise InvalidInput("meta rating matrix has duplicate datasets or algorithms")
        values = self.ratings.to_numpy(dtype=float)
        present = ~np.isnan(values)
        if not (present.any(axis=1)).all():
            empty = list(self.ratings.index[~present.any(axis=1)])
            raise InvalidInput(f"datasets {empty} have no rating", datasets=empty)
        rated = values[present]
        if ((rated < self.scale.s_min) | (rated > self.scale.s_max)).any():
            raise InvalidInput(
                f"ratings outside the scale [{self.scale.s_min}, {self.scale.s_max}]"
            )

    @property
    def datasets(self) -> tuple[DatasetId, ...]:
        return tuple(self.ratings.index)

    @property
    def algorithms(self) -> tuple[AlgorithmId, ...]:
        return tuple(self.ratings.columns)

    @property
    def density(self) -> float:
        return float(self.ratings.notna().to_numpy().mean())

    def row(self, dataset: DatasetId) -> dict[AlgorithmId, float]:
        row = self.ratings.loc[dataset].dropna()
        return {str(a): float(r) for a, r in row.items()}

    def to_long(self) -> pd.DataFrame:
        """
        Returns the present ratings as dataset, algorithm, rating rows.
        """
        frame = self.ratings.rename_axis(index="dataset", columns=None).reset_index()
        long = frame.melt(id_vars="dataset", var_name="algorithm", value_name="rating")
        long = long.dropna(subset=["rating"])
        return long.sort_values(["dataset", "algorithm"]).reset_index(drop=True)


@dataclass(frozen=True, eq=False)
class MetaDataset:
    """
    Metafeatures and target rankings of the metalevel datasets.

    Args:
        features (pandas.DataFrame): one row of metafeatures per dataset id
        targets (dict[DatasetId, AlgoRanking]): the true ranking of every dataset
    """

    features: pd.DataFrame
    targets: dict[DatasetId, AlgoRanking]

    def __post_init__(self):
        if set(self.features.index) != set(self.targets):
            raise InvalidInput("metafeatures and targets cover different datasets")
        if not np.isfinite(self.features.to_numpy(dtype=float)).all():
            raise InvalidInput("metafeatures must be finite, missing values are not imputed")
        universes = {frozenset(t) for t in self.targets.values()}
        if len(universes) > 1:
            raise InvalidInput("target rankings cover different algorithm sets")
        for dataset, target in self.targets.items():
            if len(set(target)) != len(target):
                raise InvalidInput(f"target of {dataset} is not a permutation")

    @property
    def datasets(self) -> tuple[DatasetId, ...]:
        return tuple(self.features.index)

    @property
    def algorithms(self) -> tuple[AlgorithmId, ...]:
        if not self.targets:
            return ()
        return tuple(sorted(next(iter(self.targets.values()))))

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True, eq=False)
class MetaInputs:
    """
    Everything the metalevel methods may learn from.

    Args:
        performance (PerformanceTable): the baselevel performance of all datasets
        landmarks (LandmarkTable | None): subsampling landmarker scores, needed by CF4CF
        metafeatures (pandas.DataFrame | None): one metafeature row per dataset, needed by the MtL method
    """

    performance: PerformanceTable
    landmarks: LandmarkTable | None = None
    metafeatures: pd.DataFrame | None = None
    _targets: dict = field(default_factory=dict, init=False, repr=False)

    @property
    def datasets(self) -> tuple[DatasetId, ...]:
        return self.performance.datasets

    @property
    def algorithms(self) -> tuple[AlgorithmId, ...]:
        return self.performance.algorithms

    def targets(self, measure: str) -> dict[DatasetId, AlgoRanking]:
        """
        Returns the true ranking of every dataset for the metatarget measure.
        """
        # imported here since utils imports this module
        from cf4cf.common.utils import ranking_from_scores

        if measure not in self._targets:
            self.performance.check_complete(measure)
            matrix = self.performance.score_matrix(measure)
            self._targets[measure] = {
                str(d): ranking_from_scores(row.to_dict())
                for d, row in matrix.iterrows()
            }
        return self._targets[measure]

    def meta_dataset(self, measure: str, datasets: Iterable[DatasetId]) -> MetaDataset:
        if self.metafeatures is None:
            raise InvalidInput("no metafeatures available")
        datasets = list(datasets)
        missing = [d for d in datasets if d not in self.metafeatures.index]
        if missing:
            raise InvalidInput(f"no metafeatures for {missing}", datasets=missing)
        targets = self.targets(measure)
        return MetaDataset(
            features=self.metafeatures.loc[datasets],
            targets={d: targets[d] for d in datasets},
        )


@dataclass(frozen=True)
class Cf4cfConfig:
    """
    Configuration of the CF4CF pipeline.

    Args:
        measure (str): the metatarget measure
        scale (RatingScale): scale rankings are converted to
        n_ratings (int | None): ratings kept per training row, None keeps complete rows
        n_sl (int): number of landmark ratings given to the active profile
        seed (int): seed of all sampling steps
        k (int): neighbourhood size of the CF model
        similarity (str): name of the row similarity, cosine or pearson
        min_overlap (int): co-rated algorithms needed for a nonzero similarity
        landmark_sampling (str): uniform samples n_sl landmark algorithms, top takes the n_sl best
        landmark_positions (str): full rates sampled landmarks by their position in the full landmark ranking,
            sampled converts the sampled sub-ranking on its own
    """

    measure: str = "NDCG"
    scale: RatingScale = field(default_factory=RatingScale)
    n_ratings: int | None = None
    n_sl: int = 3
    seed: int = 0
    k: int = 5
    similarity: str = "cosine"
    min_overlap: int = 2
    landmark_sampling: str = "uniform"
    landmark_positions: str = "full"

    def __post_init__(self):
        if self.n_ratings is not None and self.n_ratings < 1:
            raise InvalidInput(f"n_ratings must be at least 1, got {self.n_ratings}")
        if self.n_sl < 1:
            raise InvalidInput(f"n_sl must be at least 1, got {self.n_sl}")
        if self.k < 1:
            raise InvalidInput(f"k must be at least 1, got {self.k}")
        if self.min_overlap < 1:
            raise InvalidInput(f"min_overlap must be at least 1, got {self.min_overlap}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.landmark_sampling not in ("uniform", "top"):
            raise InvalidInput(f"unknown landmark sampling {self.landmark_sampling!r}")
        if self.landmark_positions not in ("full", "sampled"):
            raise InvalidInput(f"unknown landmark positions {self.landmark_positions!r}")
        if self.landmark_positions == "sampled" and self.n_sl < 2:
            raise InvalidInput("rating a sampled sub-ranking needs n_sl >= 2")

    def check_algorithm_count(self, m: int) -> None:
        """
        Checks n_sl and n_ratings against the size M of the algorithm set.
        """
        if m < 2:
            raise InvalidInput(f"at least 2 algorithms are needed, got {m}")
        if self.n_ratings is not None and self.n_ratings > m:
            raise InvalidInput(f"n_ratings must lie in [1, {m}], got {self.n_ratings}")
        if self.n_sl > m - 1:
            raise InvalidInput(f"n_sl must lie in [1, {m - 1}], got {self.n_sl}")


@dataclass(frozen=True)
class EvaluationConfig:
    """
    Configuration of a metalevel evaluation.

    Args:
        cf4cf (Cf4cfConfig): the pipeline configuration, its measure and seed apply to every method
        k_lr (int): neighbourhood size of the kNN label ranker
        parallel (bool): run the leave-one-out folds in worker processes
    """

    cf4cf: Cf4cfConfig = field(default_factory=Cf4cfConfig)
    k_lr: int = 3
    parallel: bool = False

    def __post_init__(self):
        if self.k_lr < 1:
            raise InvalidInput(f"k_lr must be at least 1, got {self.k_lr}")

    @property
    def measure(self) -> str:
        return self.cf4cf.measure

    @property
    def seed(self) -> int:
        return self.cf4cf.seed

    def snapshot(self) -> dict:
        snapshot = asdict(self.cf4cf)
        snapshot["k_lr"] = self.k_lr
        return snapshot


class CurvePoint(TypedDict):
    axis_value: int
    method: str
    measure: str
    mean_tau: float


@dataclass
class EvaluationReport:
    """
    Result of evaluating one method for one metatarget.

    Args:
        method (str): name of the evaluated method
        measure (str): the metatarget measure
        config (dict): snapshot of the configuration used
        tau (dict[DatasetId, float]): Kendall's tau of every held-out dataset
        impact (dict[str, dict[int, float]]): per measure, mean best score among the top t predictions
        predictions (dict[DatasetId, AlgoRanking]): the predicted rankings
        axis (str | None): the swept configuration field, if part of a sweep
        axis_value (int | None): the value of the swept field
    """

    method: str
    measure: str
    config: dict
    tau: dict[DatasetId, float]
    impact: dict[str, dict[int, float]] = field(default_factory=dict)
    predictions: dict[DatasetId, AlgoRanking] = field(default_factory=dict)
    axis: str | None = None
    axis_value: int | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        out_of_range = [d for d, t in self.tau.items() if not -1.0 <= t <= 1.0]
        if out_of_range:
            raise InvalidInput(f"tau outside [-1, 1] for {out_of_range}")

    @property
    def mean_tau(self) -> float:
        if not self.tau:
            return math.nan
        return math.fsum(self.tau.values()) / len(self.tau)

    def curve_point(self) -> CurvePoint:
        return CurvePoint(
            axis_value=self.axis_value,
            method=self.method,
            measure=self.measure,
            mean_tau=self.mean_tau,
        )

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "method": self.method,
            "measure": self.measure,
            "config": self.config,
            "axis": self.axis,
            "axis_value": self.axis_value,
            "mean_tau": self.mean_tau,
            "tau": self.tau,
            "impact": {
                measure: {str(t): v for t, v in curve.items()}
                for measure, curve in self.impact.items()
            },
            "predictions": {d: list(r) for d, r in self.predictions.items()},
        }
