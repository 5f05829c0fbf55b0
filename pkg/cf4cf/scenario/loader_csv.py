# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from cf4cf.common.exceptions import (
    ConfigError,
    DuplicateEntry,
    InvalidInput,
    ParseError,
)
from cf4cf.common.meta_objects import (
    PERFORMANCE_COLUMNS,
    RATING_COLUMNS,
    BaseRatingMatrix,
    Cf4cfConfig,
    EvaluationConfig,
    LandmarkTable,
    MetaInputs,
    PerformanceTable,
    RatingScale,
)
from cf4cf.common.outputs import frame_to_csv
from cf4cf.common.utils import parse_int_list, parse_name_list
from cf4cf.methods import ranking_methods
from cf4cf.scenario.synthetic import SyntheticSpec

logger = logging.getLogger(__name__)


def read_table(path: str | Path, header: list[str] | None = None) -> pd.DataFrame:
    """
    Reads a UTF-8 CSV file with every cell as a string.

    The returned frame carries the 1-based file line of every row in the
    column "_line", blank lines are dropped after numbering.

    Args:
        path (str | Path): the file
        header (list[str], optional): the exact header the file must start with

    Raises:
        ConfigError: if the file does not exist
        ParseError: if the file is no valid CSV or the header differs
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"file {path} does not exist", path=str(path))
    try:
        df = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"{path} is empty", path=str(path), line=1) from e
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        line = int(match.group(1)) if match else None
        raise ParseError(f"malformed CSV in {path}: {e}", path=str(path), line=line) from e
    except UnicodeDecodeError as e:
        raise ParseError(f"{path} is not UTF-8 encoded", path=str(path)) from e

    if header is not None and list(df.columns) != header:
        raise ParseError(
            f"{path} must start with the header {','.join(header)}, got {','.join(df.columns)}",
            path=str(path),
            line=1,
        )
    df = df.fillna("")
    df["_line"] = np.arange(len(df)) + 2
    blank = (df.drop(columns="_line") == "").all(axis=1)
    return df[~blank].reset_index(drop=True)


def _check_ids(df: pd.DataFrame, columns: list[str], path: Path) -> None:
    for column in columns:
        empty = df[df[column].str.strip() == ""]
        if not empty.empty:
            line = int(empty["_line"].iloc[0])
            raise ParseError(
                f"{path}:{line}: empty {column}", path=str(path), line=line, column=column
            )


def _to_float(value: str) -> float:
    try:
        return float(value)
    except ValueError:
        return math.nan


def _parse_numbers(df: pd.DataFrame, column: str, path: Path) -> pd.Series:
    # inverse of the shortest repr written by frame_to_csv
    values = df[column].str.strip().map(_to_float).astype(float)
    bad = ~np.isfinite(values.to_numpy())
    if bad.any():
        row = df[bad].iloc[0]
        line = int(row["_line"])
        raise ParseError(
            f"{path}:{line}: {column} {row[column]!r} is no finite number",
            path=str(path),
            line=line,
            column=column,
        )
    return values.astype(float)


def _check_duplicates(df: pd.DataFrame, keys: list[str], path: Path) -> None:
    duplicated = df.duplicated(keys)
    if duplicated.any():
        row = df[duplicated].iloc[0]
        line = int(row["_line"])
        key = [row[k] for k in keys]
        raise DuplicateEntry(
            f"{path}:{line}: duplicate entry {key}", path=str(path), line=line, key=key
        )


def load_performance_csv(
    path: str | Path, table_type: type[PerformanceTable] = PerformanceTable
) -> PerformanceTable:
    """
    Loads a dataset,algorithm,measure,score table.

    Args:
        path (str | Path): the CSV file
        table_type (type[PerformanceTable]): PerformanceTable or LandmarkTable

    Returns:
        PerformanceTable: the parsed table

    Raises:
        ParseError: on a malformed row, with its line number
        DuplicateEntry: at the second occurrence of a (dataset, algorithm, measure) triple
    """
    path = Path(path)
    df = read_table(path, PERFORMANCE_COLUMNS)
    _check_ids(df, ["dataset", "algorithm", "measure"], path)
    df["score"] = _parse_numbers(df, "score", path)
    for column in ["dataset", "algorithm", "measure"]:
        df[column] = df[column].str.strip()
    _check_duplicates(df, ["dataset", "algorithm", "measure"], path)
    table = table_type(df)
    logger.debug("loaded %r from %s", table, path)
    return table


def load_landmarks_csv(path: str | Path) -> LandmarkTable:
    return load_performance_csv(path, table_type=LandmarkTable)


def write_performance_csv(table: PerformanceTable, path: str | Path) -> Path:
    return frame_to_csv(table.data, path)


def load_base_ratings_csv(path: str | Path) -> BaseRatingMatrix:
    """
    Loads a user,item,rating table of one baselevel dataset.

    Raises:
        ParseError: on a malformed row, with its line number
        DuplicateEntry: at the second rating of a (user, item) pair
    """
    path = Path(path)
    df = read_table(path, RATING_COLUMNS)
    _check_ids(df, ["user", "item"], path)
    df["rating"] = _parse_numbers(df, "rating", path)
    df["user"] = df["user"].str.strip()
    df["item"] = df["item"].str.strip()
    _check_duplicates(df, ["user", "item"], path)
    return BaseRatingMatrix(df)


def load_ratings_dir(path: str | Path) -> dict[str, BaseRatingMatrix]:
    """
    Loads every CSV file of a directory, the file stem is the dataset id.
    """
    path = Path(path)
    if not path.is_dir():
        raise ConfigError(f"ratings directory {path} does not exist", path=str(path))
    datasets = {file.stem: load_base_ratings_csv(file) for file in sorted(path.glob("*.csv"))}
    if not datasets:
        raise ConfigError(f"no rating files found in {path}", path=str(path))
    return datasets


def load_metafeatures_csv(path: str | Path) -> pd.DataFrame:
    """
    Loads a dataset,<metafeature...> table into a frame indexed by dataset.

    Missing or non-finite values are rejected, they are not imputed.
    """
    path = Path(path)
    df = read_table(path)
    names = [c for c in df.columns if c not in ("dataset", "_line")]
    if df.columns[0] != "dataset" or not names:
        raise ParseError(
            f"{path} must start with a dataset column followed by metafeatures",
            path=str(path),
            line=1,
        )
    _check_ids(df, ["dataset"], path)
    df["dataset"] = df["dataset"].str.strip()
    _check_duplicates(df, ["dataset"], path)
    features = pd.DataFrame(
        {name: _parse_numbers(df, name, path) for name in names}
    ).set_index(pd.Index(df["dataset"], name="dataset"))
    return features


def write_metafeatures_csv(features: pd.DataFrame, path: str | Path) -> Path:
    return frame_to_csv(features.rename_axis("dataset"), path, index=True)


def replace_paths(config: dict, inputs_path: str | Path) -> dict:
    """
    Replaces every config item ending with "_path" by one relative to inputs_path,
    so that paths in the config are relative to the file they are read from.

    Args:
        config (dict): the config dict read from yaml
        inputs_path (str | Path): the directory of the config file

    Returns:
        dict: the adjusted config dict
    """
    if isinstance(config, dict):
        for key, value in config.items():
            if isinstance(value, dict | list):
                config[key] = replace_paths(value, inputs_path)
            elif isinstance(key, str) and key.endswith("_path") and value is not None:
                config[key] = str(Path(inputs_path, value))
    elif isinstance(config, list):
        for i, item in enumerate(config):
            config[i] = replace_paths(item, inputs_path)
    return config


def load_config(config_path: str | Path, study_case: str = "") -> dict:
    """
    Loads one study case of a YAML experiment file.

    Args:
        config_path (str | Path): the YAML file
        study_case (str): the study case, defaults to the first one in the file

    Returns:
        dict: the parameters of the study case, paths resolved
    """
    config_path = Path(config_path)
    if not config_path.is_file():
        raise ConfigError(f"config file {config_path} does not exist", path=str(config_path))
    with open(config_path, encoding="utf-8") as f:
        try:
            config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            raise ParseError(
                f"invalid YAML in {config_path}: {e}",
                path=str(config_path),
                line=mark.line + 1 if mark else None,
            ) from e
    if not isinstance(config, dict) or not config:
        raise ConfigError(f"{config_path} holds no study case", path=str(config_path))
    if not study_case:
        study_case = list(config.keys())[0]
    if study_case not in config:
        raise ConfigError(
            f"study case {study_case!r} not found in {config_path}, available: {list(config)}",
            path=str(config_path),
        )
    params = dict(config[study_case] or {})
    params.setdefault("experiment_id", study_case)
    return replace_paths(params, config_path.parent)


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Everything a command line run needs: input paths, pipeline parameters and outputs.

    Args:
        seed (int): seed of every random step, mandatory
        experiment_id (str): names the run in the database
        performance_path (str | None): performance CSV
        landmarks_path (str | None): landmark CSV
        metafeatures_path (str | None): metafeature CSV
        ratings_path (str | None): directory of baselevel rating CSVs
        output_path (str): directory results are written to
        measures (tuple[str, ...]): the metatarget measures
        scale (RatingScale): rating scale of the meta rating matrix
        n_ratings (int | None): ratings kept per training row, None keeps all
        n_sl (int): landmark ratings of the active profile
        k (int): neighbourhood size of the CF model
        k_lr (int): neighbourhood size of the label ranker
        similarity (str): cosine or pearson
        min_overlap (int): co-rated algorithms needed for a nonzero similarity
        landmark_sampling (str): uniform or top
        landmark_positions (str): full or sampled
        methods (tuple[str, ...]): methods to evaluate
        sweep_axis (str | None): n_ratings or n_sl
        sweep_values (tuple[int, ...]): values of the sweep axis
        synthetic (SyntheticSpec): corpus generated by the synth command
        subsample_fraction (float): share of ratings kept by landmark subsamples
        db_uri (str): optional database to export result tables to
        parallel (bool): run evaluation folds in worker processes
    """

    seed: int
    experiment_id: str = "cf4cf"
    performance_path: str | None = None
    landmarks_path: str | None = None
    metafeatures_path: str | None = None
    ratings_path: str | None = None
    output_path: str = "outputs"
    measures: tuple[str, ...] = ("NDCG",)
    scale: RatingScale = field(default_factory=RatingScale)
    n_ratings: int | None = None
    n_sl: int = 3
    k: int = 5
    k_lr: int = 3
    similarity: str = "cosine"
    min_overlap: int = 2
    landmark_sampling: str = "uniform"
    landmark_positions: str = "full"
    methods: tuple[str, ...] = ("cf4cf", "mtl", "baseline")
    sweep_axis: str | None = None
    sweep_values: tuple[int, ...] = ()
    synthetic: SyntheticSpec = field(default_factory=SyntheticSpec)
    subsample_fraction: float = 0.1
    db_uri: str = ""
    parallel: bool = False

    def __post_init__(self):
        if not self.measures:
            raise ConfigError("at least one measure is required")
        unknown = [m for m in self.methods if m not in ranking_methods]
        if unknown:
            raise ConfigError(
                f"unknown methods {unknown}, available: {list(ranking_methods)}",
                methods=unknown,
            )
        if self.sweep_axis is not None and self.sweep_axis not in ("n_ratings", "n_sl"):
            raise ConfigError(f"unknown sweep axis {self.sweep_axis!r}")
        if not 0 < self.subsample_fraction < 1:
            raise ConfigError(
                f"subsample_fraction must lie in (0, 1), got {self.subsample_fraction}"
            )
        for measure in self.measures:
            try:
                self.evaluation_config(measure)
            except InvalidInput as e:
                raise ConfigError(e.message, **e.context) from e

    def cf4cf_config(self, measure: str) -> Cf4cfConfig:
        return Cf4cfConfig(
            measure=measure,
            scale=self.scale,
            n_ratings=self.n_ratings,
            n_sl=self.n_sl,
            seed=self.seed,
            k=self.k,
            similarity=self.similarity,
            min_overlap=self.min_overlap,
            landmark_sampling=self.landmark_sampling,
            landmark_positions=self.landmark_positions,
        )

    def evaluation_config(self, measure: str) -> EvaluationConfig:
        return EvaluationConfig(
            cf4cf=self.cf4cf_config(measure), k_lr=self.k_lr, parallel=self.parallel
        )

    def require(self, *names: str) -> list[Path]:
        """
        Checks that the named path fields are set and exist.
        """
        paths = []
        for name in names:
            value = getattr(self, name)
            if not value:
                raise ConfigError(f"{name} is not configured", key=name)
            path = Path(value)
            if not path.exists():
                raise ConfigError(f"{name} {path} does not exist", key=name, path=str(path))
            paths.append(path)
        return paths


def _parse_n_ratings(value) -> int | None:
    if value is None or (isinstance(value, str) and value.strip().lower() == "all"):
        return None
    return int(value)


def make_experiment_config(params: dict) -> ExperimentConfig:
    """
    Builds an ExperimentConfig from study case parameters and flag overrides.

    Args:
        params (dict): keys as in the YAML file, see the documentation of the configuration

    Raises:
        ConfigError: if the seed is missing or a value is invalid
    """
    params = dict(params)
    if params.get("seed") is None:
        raise ConfigError("a seed is required, set it in the config or pass --seed")

    known = {f.name for f in fields(ExperimentConfig)}
    try:
        kwargs = {"seed": int(params.pop("seed"))}
        for key in ["measures", "measure"]:
            if key in params:
                kwargs["measures"] = parse_name_list(params.pop(key))
        if "methods" in params:
            kwargs["methods"] = parse_name_list(params.pop("methods"))
        if "method" in params:
            kwargs["methods"] = parse_name_list(params.pop("method"))
        scale_min = params.pop("scale_min", None)
        scale_max = params.pop("scale_max", None)
        if scale_min is not None or scale_max is not None:
            kwargs["scale"] = RatingScale(
                float(1.0 if scale_min is None else scale_min),
                float(5.0 if scale_max is None else scale_max),
            )
        if "n_ratings" in params:
            kwargs["n_ratings"] = _parse_n_ratings(params.pop("n_ratings"))
        sweep = params.pop("sweep", None) or {}
        if "axis" in sweep:
            kwargs["sweep_axis"] = sweep["axis"]
        if "values" in sweep:
            kwargs["sweep_values"] = tuple(parse_int_list(sweep["values"]))
        synthetic = dict(params.pop("synthetic", None) or {})
        if "measures" in synthetic:
            synthetic["measures"] = parse_name_list(synthetic["measures"])
        synthetic.setdefault("seed", kwargs["seed"])
        kwargs["synthetic"] = SyntheticSpec(**synthetic)

        for key, value in params.items():
            if key not in known:
                logger.warning("ignoring unknown config key %s", key)
                continue
            kwargs[key] = value
        for key in ["n_sl", "k", "k_lr", "min_overlap"]:
            if key in kwargs:
                kwargs[key] = int(kwargs[key])
        if "subsample_fraction" in kwargs:
            kwargs["subsample_fraction"] = float(kwargs["subsample_fraction"])
        return ExperimentConfig(**kwargs)
    except ConfigError:
        raise
    except InvalidInput as e:
        raise ConfigError(e.message, **e.context) from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def load_meta_inputs(
    config: ExperimentConfig, landmarks: bool = True, metafeatures: bool = True
) -> MetaInputs:
    """
    Loads the performance table plus the configured landmarks and metafeatures.

    Args:
        config (ExperimentConfig): the experiment configuration
        landmarks (bool): load the landmark table if configured
        metafeatures (bool): load the metafeature table if configured
    """
    (performance_path,) = config.require("performance_path")
    performance = load_performance_csv(performance_path)

    landmark_table = None
    if landmarks and config.landmarks_path:
        (landmarks_path,) = config.require("landmarks_path")
        landmark_table = load_landmarks_csv(landmarks_path)
        if set(landmark_table.algorithms) != set(performance.algorithms):
            raise InvalidInput(
                "landmarks and performance cover different algorithms",
                path=str(landmarks_path),
            )

    features = None
    if metafeatures and config.metafeatures_path:
        (metafeatures_path,) = config.require("metafeatures_path")
        features = load_metafeatures_csv(metafeatures_path)

    for measure in config.measures:
        performance.check_measure(measure)
    return MetaInputs(performance, landmark_table, features)
