# Copyright 2026 The quarl Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the quarl C++ core."""

import json as _json

from ._core import (
    ALT5_GENOME,
    REFERENCE_GENOME,
    BackendError,
    ConfigError,
    __version__,
    action_probs,
    cartpole_step,
    compile_stats,
    crowding_distance,
    expectation,
    init_params,
    non_dominated_sort,
    normalize_genome,
    parameter_counts,
    run_cli,
)
from ._core import train as _train


def train(**config):
    """Trains a policy. Keyword arguments use the config-file keys, e.g. genome, episodes, seed."""
    return _train(_json.dumps(config))


__all__ = [
    "ALT5_GENOME",
    "REFERENCE_GENOME",
    "BackendError",
    "ConfigError",
    "__version__",
    "action_probs",
    "cartpole_step",
    "compile_stats",
    "crowding_distance",
    "expectation",
    "init_params",
    "non_dominated_sort",
    "normalize_genome",
    "parameter_counts",
    "run_cli",
    "train",
]
