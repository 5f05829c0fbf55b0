# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

from cf4cf.methods.base_method import (
    AverageRankMethod,
    Cf4cfMethod,
    KnnLabelRankingMethod,
    RankingMethod,
)

ranking_methods: dict[str, type[RankingMethod]] = {
    "cf4cf": Cf4cfMethod,
    "mtl": KnnLabelRankingMethod,
    "baseline": AverageRankMethod,
}
