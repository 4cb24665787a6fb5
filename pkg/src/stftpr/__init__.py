"""Spectrogram synthesis, window certification and exact phase retrieval on Z_d."""

from .connectivity import ConnectivityPartition, components_line, components_mod_d
from .spectral import (
    ComplexTable,
    CyclicSignal,
    SpectrogramMeasurement,
    ambiguity,
    dft,
    embed_line,
    inverse_dft,
    measure,
    relation_transform,
    stft,
)
from .windows import (
    DifferenceSet,
    OmegaMask,
    WindowReport,
    classify_window,
    construct_line_difference_window,
    construct_power_window,
    construct_punctured_center_window,
    construct_punctured_dc_window,
    difference_set,
    lstar,
    omega_L_d,
    omega_mask,
    real_window_feasibility,
)

__all__ = [
    "ComplexTable",
    "ConnectivityPartition",
    "CyclicSignal",
    "DifferenceSet",
    "OmegaMask",
    "SpectrogramMeasurement",
    "WindowReport",
    "ambiguity",
    "classify_window",
    "components_line",
    "components_mod_d",
    "construct_line_difference_window",
    "construct_power_window",
    "construct_punctured_center_window",
    "construct_punctured_dc_window",
    "dft",
    "difference_set",
    "embed_line",
    "inverse_dft",
    "lstar",
    "measure",
    "omega_L_d",
    "omega_mask",
    "real_window_feasibility",
    "relation_transform",
    "stft",
]
