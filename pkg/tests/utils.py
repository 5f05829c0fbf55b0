# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import math
from itertools import combinations

import numpy as np
import pandas as pd

from cf4cf.common import MetaRatingMatrix, PerformanceTable, RatingScale
from cf4cf.common.meta_objects import LandmarkTable


def brute_force_tau(r1, r2):
    """
    Counts concordant and discordant pairs one by one.
    """
    pos1 = {a: i for i, a in enumerate(r1)}
    pos2 = {a: i for i, a in enumerate(r2)}
    concordant = discordant = 0
    for a, b in combinations(r1, 2):
        if (pos1[a] - pos1[b]) * (pos2[a] - pos2[b]) > 0:
            concordant += 1
        else:
            discordant += 1
    m = len(r1)
    return (concordant - discordant) / (m * (m - 1) / 2)


def naive_similarity(u, v, kind, min_overlap):
    shared = [a for a in sorted(u) if a in v]
    if len(shared) < min_overlap:
        return 0.0
    x = [u[a] for a in shared]
    y = [v[a] for a in shared]
    if kind == "pearson":
        mx = sum(x) / len(x)
        my = sum(y) / len(y)
        x = [xi - mx for xi in x]
        y = [yi - my for yi in y]
    dot = sum(xi * yi for xi, yi in zip(x, y))
    nx = math.sqrt(sum(xi * xi for xi in x))
    ny = math.sqrt(sum(yi * yi for yi in y))
    if nx == 0 or ny == 0:
        return 0.0
    return dot / (nx * ny)


def naive_prediction(rows, active, target, k, kind, min_overlap, scale):
    """
    Recomputes every similarity and the weighted mean without any caching.
    """
    candidates = []
    for dataset in sorted(rows):
        row = rows[dataset]
        if target not in row:
            continue
        sim = naive_similarity(active, row, kind, min_overlap)
        if sim != 0:
            candidates.append((-sim, dataset, sim, row[target]))
    candidates.sort()
    chosen = candidates[:k]
    weight = sum(abs(c[2]) for c in chosen)
    if weight == 0:
        rated = [row[target] for row in rows.values() if target in row]
        if rated:
            return sum(rated) / len(rated)
        return (scale.s_min + scale.s_max) / 2
    value = sum(c[2] * c[3] for c in chosen) / weight
    return min(max(value, scale.s_min), scale.s_max)


def random_meta_matrix(rng, n_datasets, n_algorithms, density, scale=RatingScale()):
    """
    Draws a meta rating matrix with roughly the given density and at least
    one rating per row.
    """
    algorithms = [f"a{j}" for j in range(n_algorithms)]
    datasets = [f"d{i:02d}" for i in range(n_datasets)]
    values = rng.uniform(scale.s_min, scale.s_max, size=(n_datasets, n_algorithms))
    mask = rng.random((n_datasets, n_algorithms)) < density
    mask[np.arange(n_datasets), rng.integers(n_algorithms, size=n_datasets)] = True
    frame = pd.DataFrame(
        np.where(mask, values, np.nan), index=datasets, columns=algorithms
    )
    return MetaRatingMatrix(frame, scale)


def duplicate_corpus(performance: PerformanceTable, suffix="_dup"):
    """
    Returns the corpus with every dataset present twice and noiseless landmarks.
    """
    copy = performance.data.assign(dataset=performance.data["dataset"] + suffix)
    data = pd.concat([performance.data, copy], ignore_index=True)
    doubled = PerformanceTable(data, measures=performance.measures)
    return doubled, LandmarkTable(data, measures=performance.measures)


def relative_order(ranking, subset):
    return [a for a in ranking if a in subset]
