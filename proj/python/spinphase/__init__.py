# Copyright 2026 The spinphase Authors
# SPDX-License-Identifier: Apache-2.0
"""Spin decoherence under isotropic Lindblad flow and coherent-state POVMs."""

from spinphase._core import (
    coherent_state,
    decay_rates,
    expand,
    lindblad_propagate,
    main,
    moment_index,
    povm_apply,
    povm_eigenvalue,
    positivity_time,
    quasidistribution,
    reconstruct,
    run_ensemble,
    tensor_operator,
)

__all__ = [
    "coherent_state",
    "decay_rates",
    "expand",
    "lindblad_propagate",
    "main",
    "moment_index",
    "povm_apply",
    "povm_eigenvalue",
    "positivity_time",
    "quasidistribution",
    "reconstruct",
    "run_ensemble",
    "tensor_operator",
]
