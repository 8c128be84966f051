# Copyright 2026 The orcafd Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Concept-ranking failure detection for vision-language classifiers."""

from orcafd._orcafd import (
    DEFAULT_ODIN_TEMPERATURE,
    LOGIT_SCALE,
    Bundle,
    Error,
    InputError,
    IoError,
    auroc,
    csf_doctor,
    csf_msp,
    csf_odin,
    evaluate,
    fpr_at_tpr,
    gate,
    l2_normalize,
    load_manifest,
    make_synthetic_bundle,
    orca_b,
    orca_r,
    rank_weights,
    read_matrix,
    similarity_logits,
    softmax,
    top_k_concepts,
    write_bundle,
    write_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ODIN_TEMPERATURE",
    "LOGIT_SCALE",
    "Bundle",
    "Error",
    "InputError",
    "IoError",
    "auroc",
    "csf_doctor",
    "csf_msp",
    "csf_odin",
    "evaluate",
    "fpr_at_tpr",
    "gate",
    "l2_normalize",
    "load_manifest",
    "make_synthetic_bundle",
    "orca_b",
    "orca_r",
    "rank_weights",
    "read_matrix",
    "similarity_logits",
    "softmax",
    "top_k_concepts",
    "write_bundle",
    "write_matrix",
]
