# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

from importlib.metadata import version

from cf4cf.common import Cf4cfConfig, EvaluationConfig, PerformanceTable, RatingScale
from cf4cf.scenario.loader_csv import (
    load_base_ratings_csv,
    load_config,
    load_performance_csv,
)
from cf4cf.experiment import Experiment

__version__ = version("cf4cf-toolbox")

__author__ = "CF4CF Developers"
__copyright__ = "AGPL-3.0 License"
