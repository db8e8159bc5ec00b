"""Gaussian phase-space distributions and their exact moment arithmetic.

Convention: dimensionless quadratures with vacuum variance 1/2, coordinates
ordered ``(q1, p1, q2, p2, ...)``. A coherent state therefore has covariance
``diag(1/2, 1/2)`` and Wigner function ``exp(-q**2 - p**2) / pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateCovariance,
    DegenerateObservedBlock,
    DimensionMismatch,
    NonSymmetricNoise,
    NotPositiveSemidefinite,
)

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-12
DEGENERATE_EIG = 1e-10


@dataclass(frozen=True)
class PhasePoint:
    q: float
    p: float

    def __post_init__(self):
        q, p = float(self.q), float(self.p)
        if not (math.isfinite(q) and math.isfinite(p)):
            raise ValueError(f"phase point must be finite, got ({q}, {p})")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    def as_array(self) -> np.ndarray:
        return np.array([self.q, self.p])


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_symmetric(m: np.ndarray, exc=NotPositiveSemidefinite) -> None:
    scale = max(float(np.max(np.abs(m))), 1.0) if m.size else 1.0
    if np.max(np.abs(m - m.T), initial=0.0) > SYMMETRY_RTOL * scale:
        raise exc("matrix is not symmetric")


def _check_psd(m: np.ndarray) -> None:
    if m.size == 0:
        return
    eig = np.linalg.eigvalsh(m)
    norm = float(np.max(np.abs(eig)))
    if eig[0] < -PSD_RTOL * norm:
        raise NotPositiveSemidefinite(f"smallest eigenvalue {eig[0]:.3e} is negative")


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Normalized Gaussian distribution over ``dim`` phase-space coordinates.

    ``cov`` may be singular; zero eigenvalues represent delta-function
    (degenerate) directions. Mean and covariance are stored read-only.
    """

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(np.array(self.mean, dtype=float))
        cov = np.atleast_2d(np.array(self.cov, dtype=float))
        if mean.ndim != 1 or cov.shape != (mean.size, mean.size):
            raise DimensionMismatch(f"mean of length {mean.size} with cov of shape {cov.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("mean and cov must be finite")
        _check_symmetric(cov)
        cov = 0.5 * (cov + cov.T)
        _check_psd(cov)
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(cov))

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def modes(self) -> int:
        if self.dim % 2:
            raise DimensionMismatch(f"{self.dim} coordinates do not form whole modes")
        return self.dim // 2

    @classmethod
    def coherent(cls, q: float = 0.0, p: float = 0.0) -> GaussianState:
        return cls([q, p], 0.5 * np.eye(2))

    def is_degenerate(self) -> bool:
        return bool(np.linalg.eigvalsh(self.cov)[0] < DEGENERATE_EIG)

    def __eq__(self, other):
        if not isinstance(other, GaussianState):
            return NotImplemented
        return np.array_equal(self.mean, other.mean) and np.array_equal(self.cov, other.cov)

    __hash__ = None

    def __repr__(self):
        return f"GaussianState(mean={self.mean.tolist()}, cov={self.cov.tolist()})"


@dataclass(frozen=True)
class ResourceParams:
    """Standard-form two-mode resource ``(a, b, c1, c2)``.

    Expands to the covariance
    ``[[a, 0, c1, 0], [0, a, 0, c2], [c1, 0, b, 0], [0, c2, 0, b]]``
    over ``(q2, p2, q3, p3)``. Parameters with ``a*b < c**2`` are accepted (the
    noise factors of the protocol are still defined for some of them) but
    cannot be expanded into a :class:`GaussianState`.
    """

    a: float
    b: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("a", "b", "c1", "c2"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        if self.a < 0 or self.b < 0:
            raise ValueError("a and b are variances and must be non-negative")

    @property
    def det(self) -> float:
        return (self.a * self.b - self.c1**2) * (self.a * self.b - self.c2**2)

    @property
    def is_proper(self) -> bool:
        return self.a * self.b - self.c1**2 >= 0 and self.a * self.b - self.c2**2 >= 0

    def covariance(self) -> np.ndarray:
        a, b, c1, c2 = self.a, self.b, self.c1, self.c2
        return np.array(
            [
                [a, 0.0, c1, 0.0],
                [0.0, a, 0.0, c2],
                [c1, 0.0, b, 0.0],
                [0.0, c2, 0.0, b],
            ]
        )

    def inverse_covariance(self) -> np.ndarray:
        """Closed-form inverse; raises :class:`DegenerateCovariance` when singular."""
        a, b, c1, c2 = self.a, self.b, self.c1, self.c2
        d1 = a * b - c1**2
        d2 = a * b - c2**2
        if d1 <= 0 or d2 <= 0:
            raise DegenerateCovariance("resource covariance is singular")
        return np.array(
            [
                [b / d1, 0.0, -c1 / d1, 0.0],
                [0.0, b / d2, 0.0, -c2 / d2],
                [-c1 / d1, 0.0, a / d1, 0.0],
                [0.0, -c2 / d2, 0.0, a / d2],
            ]
        )

    def to_state(self) -> GaussianState:
        if not self.is_proper:
            raise NotPositiveSemidefinite(f"{self} does not define a normalizable density")
        return GaussianState(np.zeros(4), self.covariance())


def _as_index_list(idx: Sequence[int], dim: int) -> list[int]:
    out = [int(i) for i in idx]
    if not out:
        raise DimensionMismatch("index set must be nonempty")
    if len(set(out)) != len(out) or any(i < 0 or i >= dim for i in out):
        raise DimensionMismatch(f"invalid index set {out} for dimension {dim}")
    return out


def density_at(state: GaussianState, point) -> float:
    """Evaluate the Gaussian density at ``point``."""
    x = np.atleast_1d(np.asarray(point, dtype=float))
    if x.shape != state.mean.shape:
        raise DimensionMismatch(f"point of length {x.size} for a {state.dim}-dim state")
    eig = np.linalg.eigvalsh(state.cov)
    if eig[0] < DEGENERATE_EIG:
        raise DegenerateCovariance(f"covariance eigenvalue {eig[0]:.3e} is degenerate")
    eta = x - state.mean
    quad = float(eta @ np.linalg.solve(state.cov, eta))
    norm = (2 * math.pi) ** (state.dim / 2) * math.sqrt(np.linalg.det(state.cov))
    return math.exp(-0.5 * quad) / norm


def marginal(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    """Integrate out every coordinate not listed in ``keep``."""
    idx = _as_index_list(keep, state.dim)
    return GaussianState(state.mean[idx], state.cov[np.ix_(idx, idx)])


def overlap(s1: GaussianState, s2: GaussianState) -> float:
    """Return the phase-space overlap integral of the two densities.

    For Wigner functions this equals ``Tr[rho1 rho2] / (2 pi)**n``.
    """
    if s1.dim != s2.dim:
        raise DimensionMismatch(f"{s1.dim}-dim vs {s2.dim}-dim state")
    total = s1.cov + s2.cov
    if np.linalg.eigvalsh(total)[0] < DEGENERATE_EIG:
        raise DegenerateCovariance("summed covariance is degenerate")
    delta = s1.mean - s2.mean
    quad = float(delta @ np.linalg.solve(total, delta))
    norm = (2 * math.pi) ** (s1.dim / 2) * math.sqrt(np.linalg.det(total))
    return math.exp(-0.5 * quad) / norm


def convolve(state: GaussianState, noise_cov) -> GaussianState:
    """Smear ``state`` with a zero-mean Gaussian kernel of covariance ``noise_cov``."""
    noise = np.atleast_2d(np.asarray(noise_cov, dtype=float))
    if noise.shape != state.cov.shape:
        raise DimensionMismatch(f"noise of shape {noise.shape} for a {state.dim}-dim state")
    _check_symmetric(noise, NonSymmetricNoise)
    eig = np.linalg.eigvalsh(noise)
    if eig[0] < -PSD_RTOL * max(float(np.max(np.abs(eig))), 0.0):
        raise NonSymmetricNoise("noise covariance is not positive semidefinite")
    return GaussianState(state.mean, state.cov + noise)


def condition(joint: GaussianState, observed: Sequence[int], values) -> GaussianState:
    """Condition ``joint`` on the coordinates ``observed`` taking ``values``.

    The conditional covariance is the Schur complement of the observed block
    and does not depend on ``values``.
    """
    obs = _as_index_list(observed, joint.dim)
    unobs = [i for i in range(joint.dim) if i not in obs]
    if not unobs:
        raise DimensionMismatch("cannot condition on every coordinate")
    vals = np.atleast_1d(np.asarray(values, dtype=float))
    if vals.shape != (len(obs),):
        raise DimensionMismatch(f"{vals.size} values for {len(obs)} observed coordinates")

    s_oo = joint.cov[np.ix_(obs, obs)]
    s_uo = joint.cov[np.ix_(unobs, obs)]
    s_uu = joint.cov[np.ix_(unobs, unobs)]
    if np.linalg.eigvalsh(s_oo)[0] <= DEGENERATE_EIG:
        raise DegenerateObservedBlock("observed covariance block is not positive definite")

    gain = np.linalg.solve(s_oo, s_uo.T).T
    mean = joint.mean[unobs] + gain @ (vals - joint.mean[obs])
    cov = s_uu - gain @ s_uo.T
    cov = 0.5 * (cov + cov.T)
    # Exact cancellation (e.g. a deterministic output) leaves rounding-level
    # negative eigenvalues; clip them relative to the joint scale.
    eig, vec = np.linalg.eigh(cov)
    floor = PSD_RTOL * max(float(np.max(np.abs(joint.cov))), 1.0)
    if eig[0] < 0 and eig[0] >= -floor:
        eig = np.where(eig < floor, np.clip(eig, 0.0, None), eig)
        cov = (vec * eig) @ vec.T
    return GaussianState(mean, cov)
