# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

from cf4cf.evaluation.harness import loocv, predict_fold, sweep
from cf4cf.evaluation.metrics import baselevel_impact, impact_curve, kendall_tau
