"""Teleportation of Gaussian phase-space distributions through standard-form resources."""

from .engine import (
    TeleportOutcome,
    Variant,
    added_noise,
    averaged_output,
    conditional_output,
    ensemble_perfect,
    fidelity,
    fidelity_coherent_closed_form,
    is_perfect,
    measurement_distribution,
    sender_marginal,
    teleport,
)
from .gaussian import (
    GaussianState,
    PhasePoint,
    ResourceParams,
    condition,
    convolve,
    density_at,
    marginal,
    overlap,
)
from .montecarlo import McConfig, McEstimate, conditioned_run, run_protocol
from .realizability import (
    ExactLimit,
    NamedResource,
    RealizabilityReport,
    ResourceKind,
    Verdict,
    check,
    make,
    mirror,
    mirror_entangled,
)

__version__ = "0.1.0"

__all__ = [
    "McConfig",
    "McEstimate",
    "conditioned_run",
    "run_protocol",
    "TeleportOutcome",
    "Variant",
    "added_noise",
    "averaged_output",
    "conditional_output",
    "ensemble_perfect",
    "fidelity",
    "fidelity_coherent_closed_form",
    "is_perfect",
    "measurement_distribution",
    "sender_marginal",
    "teleport",
    "GaussianState",
    "PhasePoint",
    "ResourceParams",
    "condition",
    "convolve",
    "density_at",
    "marginal",
    "overlap",
    "ExactLimit",
    "NamedResource",
    "RealizabilityReport",
    "ResourceKind",
    "Verdict",
    "check",
    "make",
    "mirror",
    "mirror_entangled",
]
