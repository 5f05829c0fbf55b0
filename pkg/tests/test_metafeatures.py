# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import math

import numpy as np
import pandas as pd
import pytest

from cf4cf.common import BaseRatingMatrix
from cf4cf.common.exceptions import InvalidInput
from cf4cf.metafeatures import (
    SELECTED_METAFEATURES,
    extract_selected,
    extract_systematic,
    metafeature_names,
)
from cf4cf.metafeatures.kernels import (
    entropy,
    gini,
    kurtosis,
    mode,
    post_functions,
    sd,
    skewness,
)


def ratings(triples, **kwargs):
    return BaseRatingMatrix(
        pd.DataFrame(triples, columns=["user", "item", "rating"]), **kwargs
    )


def random_ratings(rng, n_users=20, n_items=15, n_ratings=120):
    cells = rng.choice(n_users * n_items, size=n_ratings, replace=False)
    return ratings(
        [
            (f"u{c // n_items}", f"i{c % n_items}", float(rng.integers(1, 6)))
            for c in cells
        ]
    )


def test_sparsity():
    base = ratings([("u1", "i1", 4.0), ("u1", "i2", 3.0), ("u2", "i3", 5.0)])
    assert base.nusers == 2
    assert base.nitems == 3
    assert extract_systematic(base)["sparsity"] == 0.5


def test_constant_ratings():
    base = ratings([("u1", "i1", 3.0), ("u1", "i2", 3.0), ("u2", "i1", 3.0), ("u3", "i3", 3.0)])
    vector = extract_systematic(base)
    assert vector["R.ratings.sd"] == 0.0
    assert vector["R.ratings.entropy"] == 0.0
    assert vector["R.ratings.gini"] == 0.0


def test_user_count_mean():
    base = ratings(
        [
            ("u1", "i1", 4.0),
            ("u1", "i2", 3.0),
            ("u2", "i1", 5.0),
            ("u2", "i2", 2.0),
            ("u2", "i3", 1.0),
            ("u2", "i4", 2.0),
        ]
    )
    vector = extract_systematic(base, objects=["U"], functions=["count"], post=["mean"])
    assert vector["U.count.mean"] == 3.0
    assert list(vector) == ["U.count.mean", "nusers", "nitems", "nratings", "sparsity"]


def test_full_systematic_set(small_ratings):
    vector = extract_systematic(small_ratings)
    assert len(vector) == 74
    assert len(metafeature_names()) == 74
    assert list(vector) == metafeature_names()
    assert all(math.isfinite(v) for v in vector.values())
    assert vector["nusers"] == 3
    assert vector["nitems"] == 4
    assert vector["nratings"] == 7
    assert 0 <= vector["sparsity"] <= 1
    assert vector["nusers"] * vector["nitems"] >= vector["nratings"]


def test_selected_set(small_ratings):
    vector = extract_selected(small_ratings)
    assert len(vector) == 12
    assert tuple(vector) == SELECTED_METAFEATURES
    assert vector == {name: extract_systematic(small_ratings)[name] for name in vector}


def test_selected_examples():
    triples = [(f"u{u}", f"i{(u + j) % 4}", float(j + 1)) for u in range(7) for j in range(2)]
    base = ratings(triples)
    vector = extract_selected(base)
    assert vector["nusers"] == 7
    counts = base.ratings.groupby("item").size()
    assert vector["I.count.min"] == counts.min()

    sparse_item = ratings(
        [("u1", "i1", 1.0), ("u2", "i1", 2.0), ("u1", "i2", 3.0), ("u2", "i2", 4.0), ("u3", "i2", 5.0)]
    )
    assert extract_selected(sparse_item)["I.count.min"] == 2


def test_selected_set_skips_gini():
    base = ratings([("u1", "i1", -1.0), ("u1", "i2", 2.0), ("u2", "i1", 0.5)])
    assert len(extract_selected(base)) == 12
    with pytest.raises(InvalidInput, match="R.ratings.gini"):
        extract_systematic(base)
    without_gini = [p for p in post_functions if p != "gini"]
    vector = extract_systematic(base, post=without_gini)
    assert list(vector) == metafeature_names(post=without_gini)


def test_triple_order_invariance():
    rng = np.random.default_rng(3)
    base = random_ratings(rng)
    shuffled = ratings(base.ratings.iloc[rng.permutation(base.nratings)])
    assert extract_systematic(base) == extract_systematic(shuffled)


def test_relabeling_invariance():
    rng = np.random.default_rng(4)
    base = random_ratings(rng)
    relabeled = base.ratings.assign(
        user=base.ratings["user"].map(lambda u: f"person-{u[::-1]}"),
        item=base.ratings["item"].map(lambda i: f"movie-{i}x"),
    )
    assert extract_systematic(base) == extract_systematic(ratings(relabeled))


def test_empty_matrix():
    with pytest.raises(InvalidInput):
        extract_systematic(ratings([]))
    with pytest.raises(InvalidInput):
        extract_selected(ratings([]))


def test_unknown_names(small_ratings):
    with pytest.raises(InvalidInput):
        extract_systematic(small_ratings, objects=["X"])
    with pytest.raises(InvalidInput):
        extract_systematic(small_ratings, post=["range"])


def test_entropy_of_uniform():
    for n in [1, 2, 5, 9]:
        assert entropy(list(range(n)) * 3) == pytest.approx(math.log(n))


def test_gini():
    assert gini([4.0, 4.0, 4.0]) == 0.0
    assert gini([0.0, 0.0, 0.0]) == 0.0
    assert gini([0.0, 0.0, 0.0, 1.0]) == pytest.approx(0.75)
    assert gini([1.0, 0.0, 0.0, 0.0]) == pytest.approx(0.75)
    with pytest.raises(InvalidInput):
        gini([1.0, -2.0])


def test_moments():
    assert skewness([1, 2, 3]) == pytest.approx(0.0)
    assert kurtosis([1, 2, 3, 4]) == pytest.approx(-1.36)
    assert sd([1, 2, 3]) == pytest.approx(1.0)
    # fewer than three values or no variance
    assert sd([1, 5]) == 0.0
    assert skewness([2, 9]) == 0.0
    assert kurtosis([3, 3, 3, 3]) == 0.0


def test_mode_prefers_smallest():
    assert mode([3, 1, 3, 1, 2]) == 1.0
    assert mode([7]) == 7.0


def test_kernels_reject_empty_and_non_finite():
    for name, kernel in post_functions.items():
        with pytest.raises(InvalidInput):
            kernel([])
        with pytest.raises(InvalidInput):
            kernel([1.0, math.nan])
