# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

from cf4cf.common.meta_objects import (
    BaseRatingMatrix,
    Cf4cfConfig,
    EvaluationConfig,
    EvaluationReport,
    LandmarkTable,
    MetaDataset,
    MetaInputs,
    MetaRatingMatrix,
    PerformanceTable,
    RatingScale,
)
from cf4cf.common.outputs import WriteOutput
