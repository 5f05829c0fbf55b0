# SPDX-FileCopyrightText: CF4CF Developers
#
# SPDX-License-Identifier: AGPL-3.0-or-later

from cf4cf.metafeatures.extraction import (
    SELECTED_METAFEATURES,
    extract_selected,
    extract_systematic,
    metafeature_names,
)
from cf4cf.metafeatures.kernels import post_functions
