# SPDX-License-Identifier: Apache-2.0
"""Generative channel modeling for mmWave UAV-to-ground links."""

from ._core import (
    Dataset,
    GenerativeModel,
    OracleConfig,
    friis_loss,
    generate_city,
    link_snr,
    load_model,
    omni_pathloss,
    pathloss_3gpp,
    plos_3gpp,
    predict_state_probs,
    read_dataset,
    snr_map,
    split,
    train,
    wasserstein1,
    write_dataset,
)

__all__ = [
    "Dataset",
    "GenerativeModel",
    "OracleConfig",
    "friis_loss",
    "generate_city",
    "link_snr",
    "load_model",
    "omni_pathloss",
    "pathloss_3gpp",
    "plos_3gpp",
    "predict_state_probs",
    "read_dataset",
    "snr_map",
    "split",
    "train",
    "wasserstein1",
    "write_dataset",
]

__version__ = "0.1.0"
