# Copyright 2026 The hdring Authors
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

"""Ring-federated hyperdimensional learning with noise accounting."""

from hdring._core import (
    ConfigError,
    EncoderBasis,
    Error,
    ExperimentConfig,
    InvariantError,
    LoadError,
    NoiseLedger,
    PrivacyParams,
    blackbox_cumulative_variance,
    cross_check_ledger,
    effective_delta,
    encode,
    form_class_prototypes,
    incremental_variance,
    noise_comparison,
    predict,
    required_variance,
    run_experiment,
)

__all__ = [
    "ConfigError",
    "EncoderBasis",
    "Error",
    "ExperimentConfig",
    "InvariantError",
    "LoadError",
    "NoiseLedger",
    "PrivacyParams",
    "blackbox_cumulative_variance",
    "cross_check_ledger",
    "effective_delta",
    "encode",
    "form_class_prototypes",
    "incremental_variance",
    "noise_comparison",
    "predict",
    "required_variance",
    "run_experiment",
]
