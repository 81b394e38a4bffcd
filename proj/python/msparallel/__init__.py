"""Parallel Molmer-Sorensen pulse synthesis with a time-domain verifier.

Ion, mode and qubit indices are 0-based. Frequencies are rad/us unless a
name says MHz.
"""

from ._core import (
    Error,
    GateSolution,
    ModeSpectrum,
    PulseSolution,
    SolverContext,
    VerificationReport,
    angular_to_mhz,
    calibrate,
    compute_modes,
    gate_level_scaling,
    load_fixture,
    max_weight_matching,
    mhz_to_angular,
    rebalance_power,
    run,
    synthesize,
    verify,
    walsh_signs,
)

__all__ = [
    "Error",
    "GateSolution",
    "ModeSpectrum",
    "PulseSolution",
    "SolverContext",
    "VerificationReport",
    "angular_to_mhz",
    "calibrate",
    "compute_modes",
    "gate_level_scaling",
    "load_fixture",
    "max_weight_matching",
    "mhz_to_angular",
    "rebalance_power",
    "run",
    "synthesize",
    "verify",
    "walsh_signs",
]
