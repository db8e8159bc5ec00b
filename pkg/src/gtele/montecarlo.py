"""Seeded Monte Carlo simulation of the teleportation protocol.

Each run draws the input point and the resource pair independently, forms
the measurement record and the displaced receiver point, and records it.
Empirical moments of the ensemble are compared with the analytic engine.

Streams
-------
The sample index range is split contiguously over ``cfg.streams`` streams.
Stream ``k`` uses ``PCG64(SeedSequence(seed, spawn_key=(k,)))``, so results
depend only on ``(seed, samples, streams)`` and never on how many worker
threads execute the streams. Within a stream, draws are made in fixed-size
chunks in a fixed order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import lapack

from .engine import AnyResource, Variant, unwrap
from .errors import ExactLimitUnsupported, NonPositiveSamples, WindowTooNarrow
from .gaussian import GaussianState, PhasePoint, overlap
from .realizability import ExactLimit, ResourceKind

# Variance of the auxiliary proposal for the unobserved (q2, p2) of the
# delta-correlated limits. Outputs do not depend on it.
PROPOSAL_VARIANCE = 100.0
CHUNK = 1 << 17
MIN_ACCEPTED = 1000

SE_LABELS = ("mean_q", "mean_p", "cov_qq", "cov_qp", "cov_pp", "fidelity")


@dataclass(frozen=True)
class McConfig:
    seed: int
    samples: int
    streams: int = 1

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if int(self.samples) <= 0:
            raise NonPositiveSamples(f"samples must be positive, got {self.samples}")
        if int(self.streams) <= 0:
            raise ValueError("streams must be positive")

    def stream_sizes(self) -> list[int]:
        base, extra = divmod(self.samples, self.streams)
        return [base + (k < extra) for k in range(self.streams)]


@dataclass(frozen=True, eq=False)
class McEstimate:
    mean: np.ndarray
    cov: np.ndarray
    fidelity_estimate: float
    standard_errors: np.ndarray
    samples: int
    accepted: int | None = None
    single_shot_delta: bool = False

    def se(self, label: str) -> float:
        return float(self.standard_errors[SE_LABELS.index(label)])

    def moments(self) -> np.ndarray:
        """``(mean_q, mean_p, cov_qq, cov_qp, cov_pp, fidelity)`` in ``SE_LABELS`` order."""
        c = self.cov
        return np.array([*self.mean, c[0, 0], c[0, 1], c[1, 1], self.fidelity_estimate])

    def z_scores(self, reference: np.ndarray) -> np.ndarray:
        """Standardized deviations from reference values in ``SE_LABELS`` order.

        A zero standard error with an exact match scores zero.
        """
        diff = self.moments() - np.asarray(reference, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = diff / self.standard_errors
        return np.where(diff == 0, 0.0, z)


class ProtocolSamples(NamedTuple):
    alpha1: np.ndarray
    alpha2: np.ndarray
    alpha3: np.ndarray
    beta: np.ndarray
    output: np.ndarray


def stream_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=(stream,))))


def psd_factor(cov: np.ndarray) -> np.ndarray:
    """``L`` with ``L @ L.T == cov`` via pivoted Cholesky; columns past the rank are zero."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0]
    if not np.any(cov):
        return np.zeros_like(cov)
    tol = 1e-14 * float(np.max(np.abs(np.diag(cov))))
    c, piv, rank, info = lapack.dpstrf(cov, lower=1, tol=tol)
    if info < 0:
        raise ValueError(f"dpstrf failed with info={info}")
    low = np.tril(c)
    low[:, rank:] = 0.0
    perm = np.zeros((n, n))
    perm[piv - 1, np.arange(n)] = 1.0
    return perm @ low


def _resource_sampler(res, variant: Variant, allow_proposal: bool):
    """Return ``draw(rng, n) -> (n, 4)`` array of ``(q2, p2, q3, p3)``."""
    if isinstance(res, ExactLimit):
        if res.kind is ResourceKind.CLASSICAL_POINT:
            return lambda rng, n: np.zeros((n, 4))
        matched = (res.kind is ResourceKind.EPR_LIMIT) == (variant is Variant.STANDARD)
        if not matched:
            raise ExactLimitUnsupported(
                f"{res.kind.value} limit under the {variant.value} variant has a proposal-dependent output"
            )
        if not allow_proposal:
            raise ExactLimitUnsupported(f"{res.kind.value} limit cannot be sampled without a proposal")
        p_sign = -1.0 if res.kind is ResourceKind.EPR_LIMIT else 1.0
        scale = math.sqrt(PROPOSAL_VARIANCE)

        def draw_limit(rng, n):
            z = scale * rng.standard_normal((n, 2))
            return np.column_stack([z[:, 0], z[:, 1], z[:, 0], p_sign * z[:, 1]])

        return draw_limit

    factor = psd_factor(res.to_state().cov)
    return lambda rng, n: rng.standard_normal((n, 4)) @ factor.T


def _simulate(alpha1: np.ndarray, res: np.ndarray, variant: Variant):
    s = variant.sign
    q1, p1 = alpha1[:, 0], alpha1[:, 1]
    q2, p2, q3, p3 = res.T
    beta = np.column_stack([q2 - q1, p2 + s * p1])
    # Grouped so delta-correlated offsets cancel exactly before touching alpha1.
    out = np.column_stack([q1 + (q3 - q2), p1 + (p3 + s * p2)])
    return beta, out


def _stream(args) -> ProtocolSamples:
    seed, k, n, mean, in_factor, draw_res, variant = args
    rng = stream_rng(seed, k)
    parts = []
    for start in range(0, n, CHUNK):
        m = min(CHUNK, n - start)
        alpha1 = mean + rng.standard_normal((m, 2)) @ in_factor.T
        res = draw_res(rng, m)
        beta, out = _simulate(alpha1, res, variant)
        parts.append((alpha1, res[:, :2], res[:, 2:], beta, out))
    if not parts:
        empty = np.zeros((0, 2))
        return ProtocolSamples(empty, empty, empty, empty, empty)
    return ProtocolSamples(*(np.concatenate(col) for col in zip(*parts)))


def sample_protocol(
    input: GaussianState,
    resource: AnyResource,
    variant: Variant,
    cfg: McConfig,
    workers: int = 1,
    allow_proposal: bool = True,
) -> ProtocolSamples:
    """Draw ``cfg.samples`` independent protocol runs; arrays are in sample order."""
    if input.dim != 2:
        raise ValueError("input must be a single mode")
    variant = Variant(variant)
    draw_res = _resource_sampler(unwrap(resource), variant, allow_proposal)
    in_factor = psd_factor(input.cov)
    jobs = [
        (cfg.seed, k, n, input.mean, in_factor, draw_res, variant)
        for k, n in enumerate(cfg.stream_sizes())
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_stream, jobs))
    else:
        results = [_stream(j) for j in jobs]
    return ProtocolSamples(*(np.concatenate(col) for col in zip(*results)))


def _plugin_fidelity(input: GaussianState, mean, cov) -> float:
    return 2 * math.pi * overlap(input, GaussianState(mean, cov))


def estimate(points: np.ndarray, input: GaussianState) -> McEstimate:
    """Moments, plug-in fidelity, and delta-method standard errors of an output ensemble."""
    n = points.shape[0]
    mean = points.mean(axis=0)
    d = points - mean
    cov = d.T @ d / n
    cov = 0.5 * (cov + cov.T)
    # Per-sample influence of (mean_q, mean_p, cov_qq, cov_qp, cov_pp).
    psi = np.column_stack(
        [d[:, 0], d[:, 1], d[:, 0] ** 2 - cov[0, 0], d[:, 0] * d[:, 1] - cov[0, 1], d[:, 1] ** 2 - cov[1, 1]]
    )
    sigma = psi.T @ psi / n / n

    theta = np.array([mean[0], mean[1], cov[0, 0], cov[0, 1], cov[1, 1]])

    def fid(t):
        return _plugin_fidelity(input, t[:2], [[t[2], t[3]], [t[3], t[4]]])

    f0 = fid(theta)
    grad = np.zeros(5)
    for i in range(5):
        h = 1e-6 * max(1.0, abs(theta[i]))
        up, dn = theta.copy(), theta.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (fid(up) - fid(dn)) / (2 * h)
    se = np.sqrt(np.append(np.diag(sigma), grad @ sigma @ grad))
    return McEstimate(mean=mean, cov=cov, fidelity_estimate=f0, standard_errors=se, samples=n)


def _is_point(resource: AnyResource) -> bool:
    res = unwrap(resource)
    return isinstance(res, ExactLimit) and res.kind is ResourceKind.CLASSICAL_POINT


def run_protocol(
    input: GaussianState,
    resource: AnyResource,
    variant: Variant,
    cfg: McConfig,
    workers: int = 1,
    allow_proposal: bool = True,
) -> McEstimate:
    runs = sample_protocol(input, resource, variant, cfg, workers, allow_proposal)
    est = estimate(runs.output, input)
    if _is_point(resource):
        est = McEstimate(**{**est.__dict__, "single_shot_delta": True})
    return est


def conditioned_run(
    input: GaussianState,
    resource: AnyResource,
    variant: Variant,
    center: PhasePoint,
    tol: float,
    cfg: McConfig,
    workers: int = 1,
) -> McEstimate:
    """Rejection-sample the runs whose record falls in the box ``|beta - center| <= tol``."""
    res = unwrap(resource)
    if isinstance(res, ExactLimit) and res.kind is not ResourceKind.CLASSICAL_POINT:
        raise ExactLimitUnsupported("conditioning needs a proper measurement distribution")
    if not tol > 0:
        raise ValueError("window tolerance must be positive")
    if not isinstance(center, PhasePoint):
        center = PhasePoint(*center)
    runs = sample_protocol(input, resource, variant, cfg, workers)
    keep = np.all(np.abs(runs.beta - center.as_array()) <= tol, axis=1)
    accepted = int(keep.sum())
    if accepted < MIN_ACCEPTED:
        raise WindowTooNarrow(f"only {accepted} of {cfg.samples} samples fell in the window")
    est = estimate(runs.output[keep], input)
    return McEstimate(**{**est.__dict__, "samples": cfg.samples, "accepted": accepted})


def sender_marginal_estimate(
    alpha1: PhasePoint,
    beta: PhasePoint,
    variant: Variant,
    cfg: McConfig,
    width: float = 1e-3,
) -> tuple[float, float]:
    """Importance-sampled integral of the post-measurement sender ridge over ``(q2, p2)``.

    The two delta functions are replaced by normal kernels of standard
    deviation ``width``; ``(q2, p2)`` is drawn from normals twice as wide
    centred on the ridge. Returns ``(estimate, standard_error)`` of the
    density of subsystem 1 at ``alpha1``.
    """
    variant = Variant(variant)
    alpha1 = alpha1 if isinstance(alpha1, PhasePoint) else PhasePoint(*alpha1)
    beta = beta if isinstance(beta, PhasePoint) else PhasePoint(*beta)
    centre = np.array([alpha1.q + beta.q, beta.p - variant.sign * alpha1.p])
    spread = 2 * width
    rng = stream_rng(cfg.seed, 0)
    x = centre + spread * rng.standard_normal((cfg.samples, 2))
    dev = x - centre
    kernel = np.exp(-0.5 * np.sum(dev**2, axis=1) / width**2) / (2 * math.pi * width**2)
    proposal = np.exp(-0.5 * np.sum(dev**2, axis=1) / spread**2) / (2 * math.pi * spread**2)
    w = kernel / proposal / (2 * math.pi)
    return float(w.mean()), float(w.std(ddof=1) / math.sqrt(w.size))
