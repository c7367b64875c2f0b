# Copyright 2026 The advmt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Adversarial attacks and evaluation for translation models.

Thin wrapper around the compiled ``_advmt`` core: the six similarity
metrics, Pareto-frontier selection, the synthetic/gradient/latent attacks
and the bundled toy cipher model they run against.
"""

try:
    from ._advmt import (  # noqa: F401
        AdvmtError,
        BleuHead,
        ToyModel,
        __version__,
        bleu,
        bleuer_attack,
        chrf,
        full_report,
        full_shuffle_attack,
        mbart_attack,
        meteor,
        pareto_frontier,
        read_store,
        synthetic_attack,
        train_head,
        wer,
    )
except ImportError:  # running against a plain CMake build tree
    from _advmt import (  # noqa: F401
        AdvmtError,
        BleuHead,
        ToyModel,
        __version__,
        bleu,
        bleuer_attack,
        chrf,
        full_report,
        full_shuffle_attack,
        mbart_attack,
        meteor,
        pareto_frontier,
        read_store,
        synthetic_attack,
        train_head,
        wer,
    )

__all__ = [
    "AdvmtError",
    "BleuHead",
    "ToyModel",
    "__version__",
    "bleu",
    "bleuer_attack",
    "chrf",
    "full_report",
    "full_shuffle_attack",
    "mbart_attack",
    "meteor",
    "pareto_frontier",
    "read_store",
    "synthetic_attack",
    "train_head",
    "wer",
]
