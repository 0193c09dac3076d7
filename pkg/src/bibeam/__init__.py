"""Transmit beamforming for bistatic backscatter links.

Synthesizes free-space multipath channels from scene geometry, designs
SIR-constrained transmit beamformers via semidefinite relaxation, and
evaluates bit detection performance in closed form and by Monte Carlo.
"""

__version__ = "0.1.0"

from .scene import ArrayGeometry, SceneConfig, ChannelSet, build_ula, synth_channels
from .sdp import SdpProblem, SdpSolution, solve_sdp
from .beamforming import BeamformerOutput, mrt, sdr_beamformer, null_dli_beamformer
from .detection import GammaScheme, PeCurve, closed_form_pe, monte_carlo_pe, snr_db
from .metrics import eta, path_gain, radiation_pattern

__all__ = [
    "ArrayGeometry",
    "SceneConfig",
    "ChannelSet",
    "build_ula",
    "synth_channels",
    "SdpProblem",
    "SdpSolution",
    "solve_sdp",
    "BeamformerOutput",
    "mrt",
    "sdr_beamformer",
    "null_dli_beamformer",
    "GammaScheme",
    "PeCurve",
    "closed_form_pe",
    "monte_carlo_pe",
    "snr_db",
    "eta",
    "path_gain",
    "radiation_pattern",
]
