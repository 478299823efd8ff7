# Copyright 2026 The negrec Authors
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


"""Opponent strategy recognition for alternating-offers negotiation."""

from negrec._core import (
    ConfigError,
    EnumerationLimitError,
    NumericalError,
    ProtocolError,
    SchemaError,
    StructuralError,
    dans_classify,
    default_pool,
    featurize,
    generate_domain,
    generate_profile,
    opposition,
    overall_width,
    preset_domain,
    recognize,
    run_experiment,
    run_session,
    schema_hash,
    simulate,
    standard_experiment,
    timestep_width,
    utility,
    validate_trace,
)

__all__ = [
    "ConfigError",
    "EnumerationLimitError",
    "NumericalError",
    "ProtocolError",
    "SchemaError",
    "StructuralError",
    "dans_classify",
    "default_pool",
    "featurize",
    "generate_domain",
    "generate_profile",
    "opposition",
    "overall_width",
    "preset_domain",
    "recognize",
    "run_experiment",
    "run_session",
    "schema_hash",
    "simulate",
    "standard_experiment",
    "timestep_width",
    "utility",
    "validate_trace",
]
