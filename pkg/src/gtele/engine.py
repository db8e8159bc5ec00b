"""Analytic teleportation of a one-mode Gaussian through a two-mode resource.

Subsystem 1 holds the input, subsystems 2 and 3 the resource. The sender
measures ``beta = (q2 - q1, p2 + p1)`` and the receiver displaces subsystem 3
to ``(q3 - q_beta, p3 + p_beta)``. The classical variant measures
``p2 - p1`` and displaces by ``-p_beta`` instead; no physical apparatus
performs that joint measurement of conjugate quadratures.

Every output is obtained by pushing the joint Gaussian over
``(q1, p1, q2, p2, q3, p3)`` through the protocol's linear map and, for the
single-shot state, conditioning on ``beta``. Limit resources with
delta-function correlations are handled by dedicated exact branches.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.linalg import block_diag

from .errors import (
    DegenerateInput,
    DimensionMismatch,
    ExactLimitUnsupported,
    ImproperLimitCombination,
    NegativeNoise,
    UndefinedFidelity,
)
from .gaussian import GaussianState, PhasePoint, ResourceParams, condition, convolve, overlap
from .realizability import ExactLimit, NamedResource, ResourceKind


class Variant(str, enum.Enum):
    STANDARD = "standard"
    CLASSICAL = "classical"

    @property
    def sign(self) -> int:
        """Sign of ``p1`` in the measured momentum combination."""
        return 1 if self is Variant.STANDARD else -1

    @property
    def physically_measurable(self) -> bool:
        return self is Variant.STANDARD


AnyResource = Union[ResourceParams, ExactLimit, NamedResource]


def unwrap(resource: AnyResource) -> ResourceParams | ExactLimit:
    return resource.params if isinstance(resource, NamedResource) else resource


def protocol_map(variant: Variant) -> np.ndarray:
    """Rows map ``(q1, p1, q2, p2, q3, p3)`` to ``(q_out, p_out, q_beta, p_beta)``."""
    s = Variant(variant).sign
    return np.array(
        [
            [1.0, 0.0, -1.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, s, 0.0, 1.0],
            [-1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, s, 0.0, 1.0, 0.0, 0.0],
        ]
    )


def _require_one_mode(state: GaussianState) -> None:
    if state.dim != 2:
        raise DimensionMismatch(f"input must be a single mode, got {state.dim} coordinates")


def _resource_cov(resource: ResourceParams | ExactLimit) -> np.ndarray:
    if isinstance(resource, ExactLimit):
        return resource.covariance()
    return resource.to_state().cov


def _joint(input: GaussianState, resource_cov: np.ndarray, variant: Variant) -> GaussianState:
    m = protocol_map(variant)
    mean6 = np.concatenate([input.mean, np.zeros(4)])
    cov6 = block_diag(input.cov, resource_cov)
    return GaussianState(m @ mean6, m @ cov6 @ m.T)


def added_noise(resource: AnyResource, variant: Variant = Variant.STANDARD) -> tuple[float, float]:
    """Variances of the receiver-side offsets ``q3 - q2`` and ``p3 + s*p2``.

    Divergent limits are reported as ``inf``. The result may be negative for
    parameters far outside the normalizable region.
    """
    variant = Variant(variant)
    res = unwrap(resource)
    if isinstance(res, ExactLimit):
        if res.kind is ResourceKind.CLASSICAL_POINT:
            return 0.0, 0.0
        # EPR: p3 = -p2; mirror: p3 = +p2.
        matched = (res.kind is ResourceKind.EPR_LIMIT) == (variant is Variant.STANDARD)
        return 0.0, (0.0 if matched else math.inf)
    offsets = protocol_map(variant)[:2, 2:]
    noise = offsets @ res.covariance() @ offsets.T
    return float(noise[0, 0]), float(noise[1, 1])


def measurement_distribution(
    input: GaussianState, resource: AnyResource, variant: Variant = Variant.STANDARD
) -> GaussianState:
    """Distribution of the measurement record ``beta``."""
    _require_one_mode(input)
    if input.is_degenerate():
        raise DegenerateInput("input covariance must be positive definite")
    res = unwrap(resource)
    if isinstance(res, ExactLimit) and res.kind is not ResourceKind.CLASSICAL_POINT:
        raise ExactLimitUnsupported(f"measurement record is improper for the {res.kind.value} limit")
    joint = _joint(input, _resource_cov(res), Variant(variant))
    return GaussianState(joint.mean[2:], joint.cov[2:, 2:])


def _limit_single_shot(
    input: GaussianState, res: ExactLimit, beta: PhasePoint, variant: Variant
) -> GaussianState:
    if res.kind is ResourceKind.CLASSICAL_POINT:
        # q2 = p2 = 0 pins (q1, p1) to the record; the output is that point.
        return GaussianState([-beta.q, variant.sign * beta.p], np.zeros((2, 2)))
    nq, np_ = added_noise(res, variant)
    if nq or np_:
        raise ImproperLimitCombination(f"{res.kind.value} limit diverges under the {variant.value} variant")
    return input


def conditional_output(
    input: GaussianState,
    resource: AnyResource,
    beta: PhasePoint,
    variant: Variant = Variant.STANDARD,
) -> GaussianState:
    """Receiver's state after one run with measurement record ``beta``."""
    _require_one_mode(input)
    variant = Variant(variant)
    if not isinstance(beta, PhasePoint):
        beta = PhasePoint(*beta)
    res = unwrap(resource)
    if isinstance(res, ExactLimit):
        return _limit_single_shot(input, res, beta, variant)
    joint = _joint(input, _resource_cov(res), variant)
    return condition(joint, [2, 3], beta.as_array())


def averaged_output(
    input: GaussianState, resource: AnyResource, variant: Variant = Variant.STANDARD
) -> GaussianState:
    """Output state averaged over all measurement records.

    Equal to the input smeared by the added noise; raises
    :class:`NegativeNoise` rather than clamping an undefined kernel.
    """
    _require_one_mode(input)
    variant = Variant(variant)
    nq, np_ = added_noise(resource, variant)
    if math.isinf(nq) or math.isinf(np_):
        raise ImproperLimitCombination(f"added noise diverges under the {variant.value} variant")
    if nq < 0 or np_ < 0:
        raise NegativeNoise(f"added noise ({nq}, {np_}) is negative")
    return convolve(input, np.diag([nq, np_]))


@dataclass(frozen=True)
class UniformDensity:
    """A phase-space density that is the same constant everywhere."""

    value: float


def sender_marginal(
    resource: AnyResource, beta: PhasePoint, variant: Variant = Variant.STANDARD
) -> UniformDensity:
    """Density of subsystem 1 after the measurement.

    The post-measurement sender state is the ridge
    ``delta(q2 - q1 - q_beta) delta(p2 + s p1 - p_beta) / (2 pi)``; integrating
    out ``(q2, p2)`` leaves ``1 / (2 pi |J|)`` with ``J`` the Jacobian of the
    constraint in ``(q2, p2)``. Neither ``beta`` nor the resource enters.
    """
    if not isinstance(beta, PhasePoint):
        beta = PhasePoint(*beta)
    if not isinstance(unwrap(resource), (ResourceParams, ExactLimit)):
        raise TypeError(f"not a resource: {resource!r}")
    jac = protocol_map(variant)[2:, 2:4]
    return UniformDensity(1.0 / (2 * math.pi * abs(float(np.linalg.det(jac)))))


def ensemble_perfect(resource: AnyResource, variant: Variant = Variant.STANDARD) -> bool:
    """True when the averaged output reproduces every input (zero added noise)."""
    return added_noise(resource, variant) == (0.0, 0.0)


def is_perfect(resource: AnyResource, variant: Variant = Variant.STANDARD) -> bool:
    """True when a single run already returns the input, whatever ``beta`` is.

    Only the delta-correlated limits matched to the variant qualify. With any
    finite resource the record ``beta`` is correlated with the input through
    ``q1``, so conditioning on it changes the output; the classical point
    gives a delta at the measured input point and is perfect only as an
    ensemble.
    """
    res = unwrap(resource)
    if not isinstance(res, ExactLimit) or res.kind is ResourceKind.CLASSICAL_POINT:
        return False
    return ensemble_perfect(res, variant)


def fidelity(input: GaussianState, output: GaussianState) -> float:
    """``2 pi`` times the overlap of input and output (not the Uhlmann fidelity)."""
    _require_one_mode(input)
    _require_one_mode(output)
    return 2 * math.pi * overlap(input, output)


def fidelity_coherent_closed_form(resource: ResourceParams | NamedResource) -> float:
    """Coherent-input fidelity of the standard protocol in closed form."""
    p = unwrap(resource)
    if not isinstance(p, ResourceParams):
        raise ExactLimitUnsupported("closed form needs finite parameters")
    f_q = p.a + p.b - 2 * p.c1 + 1
    f_p = p.a + p.b + 2 * p.c2 + 1
    if f_q <= 0 or f_p <= 0:
        raise UndefinedFidelity(f"noise factors ({f_q}, {f_p}) must be positive")
    return 1.0 / math.sqrt(f_q * f_p)


@dataclass(frozen=True)
class TeleportOutcome:
    beta: PhasePoint
    conditional_output: GaussianState
    averaged_output: GaussianState
    noise_q: float
    noise_p: float
    fidelity: float
    variant: Variant


def teleport(
    input: GaussianState,
    resource: AnyResource,
    beta: PhasePoint = PhasePoint(0.0, 0.0),
    variant: Variant = Variant.STANDARD,
) -> TeleportOutcome:
    variant = Variant(variant)
    avg = averaged_output(input, resource, variant)
    nq, np_ = added_noise(resource, variant)
    return TeleportOutcome(
        beta=beta,
        conditional_output=conditional_output(input, resource, beta, variant),
        averaged_output=avg,
        noise_q=nq,
        noise_p=np_,
        fidelity=fidelity(input, avg),
        variant=variant,
    )
