"""Tone-reservation PAPR reduction for OFDM with sensing-friendly reserved tones."""

from .core import (
    SPEED_OF_LIGHT,
    ComplexSignal,
    Constellation,
    Domain,
    dft,
    idft,
    map_symbols,
    oversampled_idft,
    papr_db,
    pnorm,
)
from .pgd import SolverConfig, SolverResult, euclidean_gradient, lipschitz_step_bound, objective, project_unit_circle, solve
from .qcqp import Certificate, QcqpConfig, QcqpResult, certify, solve_qcqp
from .sensing import AacfResult, RadarScene, aacf, apply_radar_channel, estimate_delay, estimate_range, ranging_rmse
from .tones import TonePlan, build_tone_plan, embed, extract_data, extract_rt, partial_idft

__all__ = [
    "SPEED_OF_LIGHT",
    "ComplexSignal",
    "Constellation",
    "Domain",
    "dft",
    "idft",
    "map_symbols",
    "oversampled_idft",
    "papr_db",
    "pnorm",
    "SolverConfig",
    "SolverResult",
    "euclidean_gradient",
    "lipschitz_step_bound",
    "objective",
    "project_unit_circle",
    "solve",
    "Certificate",
    "QcqpConfig",
    "QcqpResult",
    "certify",
    "solve_qcqp",
    "AacfResult",
    "RadarScene",
    "aacf",
    "apply_radar_channel",
    "estimate_delay",
    "estimate_range",
    "ranging_rmse",
    "TonePlan",
    "build_tone_plan",
    "embed",
    "extract_data",
    "extract_rt",
    "partial_idft",
]
