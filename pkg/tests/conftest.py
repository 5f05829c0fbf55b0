# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

import pandas as pd
import pytest

from cf4cf.common import BaseRatingMatrix, MetaInputs, PerformanceTable
from cf4cf.common.meta_objects import LandmarkTable
from cf4cf.scenario.synthetic import SyntheticSpec, generate_synthetic


@pytest.fixture
def toy_performance():
    # three datasets, four algorithms, distinct rankings
    return PerformanceTable.from_scores(
        {
            "d1": {"a1": 0.9, "a2": 0.7, "a3": 0.5, "a4": 0.3},
            "d2": {"a1": 0.2, "a2": 0.8, "a3": 0.6, "a4": 0.4},
            "d3": {"a1": 0.4, "a2": 0.1, "a3": 0.9, "a4": 0.6},
        },
        "NDCG",
    )


@pytest.fixture
def toy_landmarks(toy_performance):
    return LandmarkTable(toy_performance.data, measures=toy_performance.measures)


@pytest.fixture(scope="session")
def clustered_corpus():
    spec = SyntheticSpec(
        n_datasets=40, n_algorithms=5, n_clusters=2, landmark_noise=0.05, seed=1
    )
    return generate_synthetic(spec)


@pytest.fixture(scope="session")
def clustered_inputs(clustered_corpus):
    performance, landmarks, features = clustered_corpus
    return MetaInputs(performance, landmarks, features)


@pytest.fixture
def small_ratings():
    return BaseRatingMatrix(
        pd.DataFrame(
            [
                ("u1", "i1", 5.0),
                ("u1", "i2", 3.0),
                ("u2", "i1", 4.0),
                ("u2", "i3", 1.0),
                ("u3", "i2", 2.0),
                ("u3", "i3", 2.0),
                ("u3", "i4", 5.0),
            ],
            columns=["user", "item", "rating"],
        )
    )
