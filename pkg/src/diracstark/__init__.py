"""Dirac particle in a double point-well potential with and without a constant field."""
try:
    from importlib.metadata import PackageNotFoundError, version as _version
    __version__ = _version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .model import ModelParams, JumpMatrix, jump_matrix_left, jump_matrix_right
from .zerofield import (BoundStateSet, SpectralSample, bound_states, double_delta_density,
                        double_delta_m_plus, free_density, free_m_plus, trig_basis)
from .pcf import PcfQuad, PcfValue, pcf_asymptotic, pcf_quad, pcf_u
from .starkfield import (FieldEvaluator, FieldState, MPair, m_functions, stark_density)
from .poles import (PoleRecord, PoleTrace, classify_events, continue_in_R, find_pole,
                    initial_seeds)

__all__ = [
    "ModelParams", "JumpMatrix", "jump_matrix_left", "jump_matrix_right",
    "BoundStateSet", "SpectralSample", "bound_states", "double_delta_density",
    "double_delta_m_plus", "free_density", "free_m_plus", "trig_basis",
    "PcfQuad", "PcfValue", "pcf_asymptotic", "pcf_quad", "pcf_u",
    "FieldEvaluator", "FieldState", "MPair", "m_functions", "stark_density",
    "PoleRecord", "PoleTrace", "classify_events", "continue_in_R", "find_pole", "initial_seeds",
]
