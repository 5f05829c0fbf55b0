# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import logging
import math
from collections.abc import Iterable

import numpy as np

from cf4cf.common.exceptions import InvalidInput
from cf4cf.common.meta_objects import BaseRatingMatrix, MetafeatureVector
from cf4cf.metafeatures.kernels import post_functions

logger = logging.getLogger(__name__)

OBJECTS = ("R", "U", "I")
FUNCTIONS = ("ratings", "count", "mean", "sum")
POST_FUNCTIONS = tuple(post_functions)
COUNT_METAFEATURES = ("nusers", "nitems", "nratings", "sparsity")

# the twelve metafeatures kept by correlation feature selection
SELECTED_METAFEATURES = (
    "nusers",
    "R.ratings.kurtosis",
    "R.ratings.sd",
    "I.count.kurtosis",
    "I.count.min",
    "I.mean.entropy",
    "I.sum.skewness",
    "U.sum.entropy",
    "U.mean.min",
    "sparsity",
    "U.sum.kurtosis",
    "U.mean.skewness",
)


def is_valid_combination(obj: str, function: str) -> bool:
    """
    The rating multiset only supports the identity function, rows and columns
    support the aggregating ones.
    """
    if obj == "R":
        return function == "ratings"
    return function != "ratings"


def metafeature_names(
    objects: Iterable[str] = OBJECTS,
    functions: Iterable[str] = FUNCTIONS,
    post: Iterable[str] = POST_FUNCTIONS,
) -> list[str]:
    objects, functions, post = list(objects), list(functions), list(post)
    for name, given, known in [
        ("object", objects, OBJECTS),
        ("function", functions, FUNCTIONS),
        ("post-function", post, POST_FUNCTIONS),
    ]:
        unknown = [g for g in given if g not in known]
        if unknown:
            raise InvalidInput(f"unknown {name}s {unknown}, available: {list(known)}")
    names = [
        f"{obj}.{function}.{pf}"
        for obj in objects
        for function in functions
        if is_valid_combination(obj, function)
        for pf in post
    ]
    return names + list(COUNT_METAFEATURES)


def _aggregate(base: BaseRatingMatrix, obj: str, function: str) -> np.ndarray:
    """
    Returns the vector the post-functions summarise, sorted ascending so the
    result does not depend on triple order or id labels.
    """
    if obj == "R":
        return np.sort(base.ratings["rating"].to_numpy(dtype=float))
    key = "user" if obj == "U" else "item"
    grouped = base.ratings.groupby(key, sort=False)["rating"]
    if function == "count":
        values = grouped.count()
    elif function == "sum":
        values = grouped.agg(math.fsum)
    else:
        values = grouped.agg(lambda r: math.fsum(r) / len(r))
    return np.sort(values.to_numpy(dtype=float))


def extract_systematic(
    base: BaseRatingMatrix,
    objects: Iterable[str] = OBJECTS,
    functions: Iterable[str] = FUNCTIONS,
    post: Iterable[str] = POST_FUNCTIONS,
) -> MetafeatureVector:
    """
    Extracts the object.function.post-function metafeatures of a rating matrix.

    For object R the function is applied to the multiset of all ratings, for
    U and I it is applied per user and per item, yielding one value per row
    or column with at least one rating. The post-function then summarises that
    vector. nusers, nitems, nratings and sparsity are appended.

    Args:
        base (BaseRatingMatrix): the baselevel dataset
        objects (Iterable[str]): subset of R, U, I
        functions (Iterable[str]): subset of ratings, count, mean, sum
        post (Iterable[str]): subset of the post-function names

    Returns:
        MetafeatureVector: 74 values with the default arguments

    Raises:
        InvalidInput: if the matrix is empty or a name is unknown, or if a rating
            is negative while the gini post-function is requested
    """
    names = metafeature_names(objects, functions, post)
    if base.nratings == 0:
        raise InvalidInput("cannot extract metafeatures from an empty rating matrix")

    vector: MetafeatureVector = {}
    vectors: dict[tuple[str, str], np.ndarray] = {}
    for name in names[: -len(COUNT_METAFEATURES)]:
        obj, function, pf = name.split(".")
        if (obj, function) not in vectors:
            vectors[obj, function] = _aggregate(base, obj, function)
        try:
            vector[name] = post_functions[pf](vectors[obj, function])
        except InvalidInput as e:
            raise InvalidInput(f"metafeature {name}: {e.message}", metafeature=name) from e

    vector["nusers"] = float(base.nusers)
    vector["nitems"] = float(base.nitems)
    vector["nratings"] = float(base.nratings)
    vector["sparsity"] = base.sparsity
    logger.debug("extracted %d metafeatures", len(vector))
    return vector


def extract_selected(base: BaseRatingMatrix) -> MetafeatureVector:
    """
    Extracts the twelve selected metafeatures in their canonical order.
    """
    vector = extract_systematic(
        base,
        objects=("R", "U", "I"),
        functions=("ratings", "count", "mean", "sum"),
        post=("sd", "min", "entropy", "skewness", "kurtosis"),
    )
    return {name: vector[name] for name in SELECTED_METAFEATURES}
