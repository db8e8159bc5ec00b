"""Physical-realizability classification of standard-form resources.

A standard-form resource is a valid Wigner function only if four
uncertainty products clear their bounds::

    a**2 >= 1/4,   b**2 >= 1/4,
    (a + b + 2 c1)(a + b + 2 c2) >= 1,
    (a + b - 2 c1)(a + b - 2 c2) >= 1.

Flipping the sign of ``c2`` (mirroring ``p2 -> -p2``) and re-checking gives
the partial-transpose entanglement test for standard-form states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ExactLimitUnsupported, NegativeSqueezing
from .gaussian import ResourceParams

TOL = 1e-12


class Verdict(str, enum.Enum):
    PHYSICAL = "Physical"
    NONPHYSICAL = "Nonphysical"


class ResourceKind(str, enum.Enum):
    TMSS = "tmss"
    EPR_LIMIT = "epr"
    MIRROR_TMSS = "mirror-tmss"
    MIRROR_LIMIT = "mirror"
    CLASSICAL_POINT = "point"


@dataclass(frozen=True)
class ExactLimit:
    """Marker for a resource that exists only as a limit (delta-function correlations).

    ``kind`` is one of the three limit kinds of :class:`ResourceKind`.
    """

    kind: ResourceKind

    def __post_init__(self):
        if self.kind not in LIMIT_KINDS:
            raise ValueError(f"{self.kind} is not an exact-limit kind")

    def covariance(self) -> np.ndarray:
        """Null matrix for the classical point; the other limits have no finite covariance."""
        if self.kind is ResourceKind.CLASSICAL_POINT:
            return np.zeros((4, 4))
        raise ExactLimitUnsupported(f"{self.kind.value} has no finite covariance")


LIMIT_KINDS = (ResourceKind.EPR_LIMIT, ResourceKind.MIRROR_LIMIT, ResourceKind.CLASSICAL_POINT)


@dataclass(frozen=True)
class NamedResource:
    kind: ResourceKind
    params: Union[ResourceParams, ExactLimit]
    r: float | None = None

    def uncertainty_factors(self) -> tuple[float, float, float, float]:
        """``(a+b+2c1, a+b+2c2, a+b-2c1, a+b-2c2)`` without float cancellation."""
        if self.kind is ResourceKind.TMSS:
            up, down = math.exp(2 * self.r), math.exp(-2 * self.r)
            return up, down, down, up
        if self.kind is ResourceKind.MIRROR_TMSS:
            up, down = math.exp(2 * self.r), math.exp(-2 * self.r)
            return up, up, down, down
        return _raw_factors(self.params)


Resource = Union[ResourceParams, ExactLimit, NamedResource]


@dataclass(frozen=True)
class RealizabilityReport:
    single_mode_2: float
    single_mode_3: float
    sum_product: float
    diff_product: float
    verdict: Verdict
    saturated: frozenset
    mirror_entangled: bool

    def as_dict(self) -> dict:
        return {
            "single_mode_2": self.single_mode_2,
            "single_mode_3": self.single_mode_3,
            "sum_product": self.sum_product,
            "diff_product": self.diff_product,
            "verdict": self.verdict.value,
            "saturated": sorted(self.saturated),
            "mirror_entangled": self.mirror_entangled,
        }


def _raw_factors(p: ResourceParams) -> tuple[float, float, float, float]:
    s = p.a + p.b
    return s + 2 * p.c1, s + 2 * p.c2, s - 2 * p.c1, s - 2 * p.c2


_BOUND_NAMES = ("single_mode_2", "single_mode_3", "sum_product", "diff_product")

# Limit values of the four products, taken along the TMSS / mirrored-TMSS
# families as r -> infinity and at the null covariance.
_LIMIT_PRODUCTS = {
    ResourceKind.EPR_LIMIT: (math.inf, math.inf, 1.0, 1.0),
    ResourceKind.MIRROR_LIMIT: (math.inf, math.inf, math.inf, 0.0),
    ResourceKind.CLASSICAL_POINT: (0.0, 0.0, 0.0, 0.0),
}


def _products(resource: Resource) -> tuple[tuple[float, ...], float]:
    """The four products and the pair-product tolerance scale."""
    if isinstance(resource, NamedResource):
        if isinstance(resource.params, ExactLimit):
            return _LIMIT_PRODUCTS[resource.kind], 1.0
        p = resource.params
        f = resource.uncertainty_factors()
        return (p.a**2, p.b**2, f[0] * f[1], f[2] * f[3]), 1.0
    if isinstance(resource, ExactLimit):
        return _LIMIT_PRODUCTS[resource.kind], 1.0
    f = _raw_factors(resource)
    # Rounding in a, b, c carries into the nearly-cancelling factor with an
    # absolute error ~ eps * (a + b), i.e. ~ eps * (a + b)**2 in the product.
    scale = max(1.0, (resource.a + resource.b) ** 2)
    return (resource.a**2, resource.b**2, f[0] * f[1], f[2] * f[3]), scale


def _verdict(products, scale) -> tuple[Verdict, frozenset]:
    bounds = (0.25, 0.25, 1.0, 1.0)
    tols = (TOL, TOL, TOL * scale, TOL * scale)
    ok = all(v >= b - t for v, b, t in zip(products, bounds, tols))
    saturated = frozenset(
        name
        for name, v, b, t in zip(_BOUND_NAMES, products, bounds, tols)
        if math.isfinite(v) and abs(v - b) <= t
    )
    return (Verdict.PHYSICAL if ok else Verdict.NONPHYSICAL), saturated


def _is_physical(resource: Resource) -> bool:
    return _verdict(*_products(resource))[0] is Verdict.PHYSICAL


def mirror(resource: Resource) -> Resource:
    """Apply the momentum mirror ``p2 -> -p2`` (flip ``c2``); an involution."""
    if isinstance(resource, ResourceParams):
        return ResourceParams(resource.a, resource.b, resource.c1, -resource.c2)
    if isinstance(resource, ExactLimit):
        swap = {
            ResourceKind.EPR_LIMIT: ResourceKind.MIRROR_LIMIT,
            ResourceKind.MIRROR_LIMIT: ResourceKind.EPR_LIMIT,
            ResourceKind.CLASSICAL_POINT: ResourceKind.CLASSICAL_POINT,
        }
        return ExactLimit(swap[resource.kind])
    swap = {
        ResourceKind.TMSS: ResourceKind.MIRROR_TMSS,
        ResourceKind.MIRROR_TMSS: ResourceKind.TMSS,
        ResourceKind.EPR_LIMIT: ResourceKind.MIRROR_LIMIT,
        ResourceKind.MIRROR_LIMIT: ResourceKind.EPR_LIMIT,
        ResourceKind.CLASSICAL_POINT: ResourceKind.CLASSICAL_POINT,
    }
    return NamedResource(swap[resource.kind], mirror(resource.params), resource.r)


def mirror_entangled(resource: Resource) -> bool:
    """True for a physical resource whose mirror image is unphysical."""
    return _is_physical(resource) and not _is_physical(mirror(resource))


def check(resource: Resource) -> RealizabilityReport:
    products, scale = _products(resource)
    verdict, saturated = _verdict(products, scale)
    return RealizabilityReport(
        *products,
        verdict=verdict,
        saturated=saturated,
        mirror_entangled=mirror_entangled(resource),
    )


def make(kind: ResourceKind | str, r: float | None = None) -> NamedResource:
    """Build one of the named resources.

    ``tmss`` and ``mirror-tmss`` need the squeezing ``r >= 0``; the limit
    kinds take no parameter and carry an :class:`ExactLimit` marker.
    """
    kind = ResourceKind(kind)
    if kind in LIMIT_KINDS:
        return NamedResource(kind, ExactLimit(kind))
    if r is None:
        raise ValueError(f"{kind.value} needs a squeezing parameter")
    r = float(r)
    if not math.isfinite(r):
        raise ValueError("squeezing must be finite")
    if r < 0:
        raise NegativeSqueezing(f"squeezing must be non-negative, got {r}")
    a = math.cosh(2 * r) / 2
    c = math.sinh(2 * r) / 2
    c2 = -c if kind is ResourceKind.TMSS else c
    return NamedResource(kind, ResourceParams(a, a, c, c2), r)
