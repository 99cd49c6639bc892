"""Gaussian conjugate posterior and squared posterior contraction.

For the white-noise observation Y = g0 + xi / sqrt(n) with a centered
Gaussian prior of covariance C (rank <= k), the posterior is Gaussian with

    mean = (C + 1/n)^{-1} C Y,    covariance = (1/n) (C + 1/n)^{-1} C.

The squared posterior contraction splits exactly into squared bias,
estimation variance and posterior spread; all three are available in closed
form, and a seeded Monte Carlo over data replicates serves as an
independent oracle.  Each replicate draws from its own counter-based stream
keyed by (master seed, replicate index), so parallel evaluation is
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._backend import count_outside, spc_replicates
from .spectra import MatrixProblem, SequenceProblem

__all__ = [
    "PosteriorSummary",
    "SpcReport",
    "McEstimate",
    "posterior_direct",
    "spc_exact",
    "spc_monte_carlo",
    "contraction_probability",
]


@dataclass(frozen=True)
class PosteriorSummary:
    """Posterior mean and covariance; diagonal problems store variances only."""

    mean: np.ndarray
    variance: np.ndarray | None
    covariance: np.ndarray | None
    level: int


@dataclass(frozen=True)
class SpcReport:
    bias_sq: float
    variance: float
    spread: float
    total: float
    mc_estimate: float | None = None
    mc_stderr: float | None = None


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    reps: int


def _trailing_support(c: np.ndarray) -> int:
    nz = np.nonzero(c)[0]
    return int(nz[-1]) + 1 if nz.size else 0


def posterior_direct(prior_var, n: float, y) -> PosteriorSummary:
    """Posterior from a truncated prior variance spec and one observation.

    prior_var may be a vector of per-coordinate variances (zeros beyond the
    truncation level) or a dense PSD covariance matrix of rank <= k.
    """
    if not n > 0:
        raise ValueError("noise level n must be positive")
    c = np.asarray(prior_var, dtype=float)
    y = np.asarray(y, dtype=float)
    if c.ndim == 1:
        if np.any(c < 0.0):
            raise ValueError("prior variances must be nonnegative")
        w = c / (c + 1.0 / n)
        return PosteriorSummary(w * y, w / n, None, _trailing_support(c))
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError("dense prior covariance must be square")
    m = c + np.eye(c.shape[0]) / n
    mean = np.linalg.solve(m, c @ y)
    cov = np.linalg.solve(m, c) / n
    cov = 0.5 * (cov + cov.T)
    w = np.linalg.eigvalsh(c)
    level = int(np.count_nonzero(w > w.max() * 1e-12)) if w.size else 0
    return PosteriorSummary(mean, None, cov, level)


def _diagonal_components(c_head, g0_head, g0_tail_sq, n):
    one_minus_w = (1.0 / n) / (c_head + 1.0 / n)
    w = c_head / (c_head + 1.0 / n)
    bias_sq = float(np.sum((one_minus_w * g0_head) ** 2)) + g0_tail_sq
    variance = float(np.sum(w**2)) / n
    spread = float(np.sum(w)) / n
    return bias_sq, variance, spread


def _problem_eigenframe(problem, k: int):
    """Per-coordinate prior variances and rotated truth for level k.

    Diagonal problems use their native coordinates.  Dense problems rotate
    into the eigenbasis of the truncated covariance C_k, where the white
    noise stays white; zero-variance coordinates carry the bias tail.
    """
    if isinstance(problem, SequenceProblem):
        if not 0 <= k <= problem.n_dim:
            raise ValueError("truncation level exceeds the ambient dimension")
        c = problem.prior_variances.copy()
        c[k:] = 0.0
        return c, problem.g0
    if isinstance(problem, MatrixProblem):
        if not 0 <= k <= problem.n_dim:
            raise ValueError("truncation level exceeds the ambient dimension")
        ck = problem.prior_cov_truncated(k)
        w, v = np.linalg.eigh(ck)
        w = np.maximum(w[::-1], 0.0)
        v = v[:, ::-1]
        return w, v.T @ problem.g0
    raise TypeError("expected a SequenceProblem or MatrixProblem")


def spc_exact(problem, k: int) -> SpcReport:
    """Exact squared posterior contraction at truncation level k.

    bias^2 collects the shrinkage error on the first k coordinates plus the
    full energy of the truth beyond them; variance and spread are the
    closed-form traces.
    """
    c, g0 = _problem_eigenframe(problem, k)
    active = c > 0.0
    bias_sq, variance, spread = _diagonal_components(
        c[active], g0[active], float(np.sum(g0[~active] ** 2)), problem.n
    )
    return SpcReport(bias_sq, variance, spread, bias_sq + variance + spread)


@lru_cache(maxsize=64)
def _stream_base(master: int) -> int:
    return int(np.random.SeedSequence(master).generate_state(1, np.uint64)[0])


def _stream(master: int, index: int) -> np.random.Generator:
    key = np.array([_stream_base(master), index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def spc_monte_carlo(problem, k: int, reps: int, seed: int) -> McEstimate:
    """Monte Carlo squared posterior contraction over data replicates.

    Per replicate the posterior expectation is evaluated in closed form as
    |g0 - mean|^2 + tr(posterior covariance); only the data average is
    sampled.  Replicate r draws from the stream keyed (seed, r), so the
    estimate is deterministic given the seed and independent of chunking.
    """
    if reps < 2:
        raise ValueError("need at least two replicates")
    c, g0 = _problem_eigenframe(problem, k)
    n = problem.n
    active = c > 0.0
    c_head, g0_head = c[active], g0[active]
    w = c_head / (c_head + 1.0 / n)
    shift = (1.0 - w) * g0_head
    scale = w / math.sqrt(n)
    const = float(np.sum(g0[~active] ** 2)) + float(np.sum(w)) / n
    dim = c_head.size
    vals = np.empty(reps)
    chunk = max(1, min(reps, (1 << 22) // max(dim, 1)))
    start = 0
    while start < reps:
        stop = min(start + chunk, reps)
        noise = np.empty((stop - start, dim))
        for r in range(start, stop):
            noise[r - start] = _stream(seed, r).standard_normal(dim)
        vals[start:stop] = np.asarray(spc_replicates(shift, scale, noise))
        start = stop
    vals += const
    est = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(reps))
    return McEstimate(est, stderr, reps)


def contraction_probability(
    problem: SequenceProblem,
    k: int,
    eps_n: float,
    m_radius: float,
    reps_outer: int,
    reps_inner: int,
    seed: int,
) -> float:
    """Expected posterior mass outside the ball of radius m_radius * eps_n.

    Nested Monte Carlo for the inverse problem in the commuting diagonal
    mode: the outer loop draws data, the inner loop samples the
    coordinatewise posterior on the first k coordinates (the posterior is a
    point mass at zero beyond the truncation).  Outer replicate r uses
    stream (seed, 2r) for the data and (seed, 2r+1) for the inner samples.
    """
    if not isinstance(problem, SequenceProblem):
        raise TypeError("contraction_probability needs the commuting diagonal mode")
    if not 0 <= k <= problem.n_dim:
        raise ValueError("truncation level exceeds the ambient dimension")
    if eps_n < 0.0 or m_radius < 0.0:
        raise ValueError("radius factors must be nonnegative")
    n = problem.n
    a = np.sqrt(problem.s_forward[:k])
    lam = problem.s_prior[:k]
    f0_head = problem.f0[:k]
    tail_sq = float(np.sum(problem.f0[k:] ** 2))
    denom = a**2 * lam + 1.0 / n
    gain = lam * a / denom
    sd = np.sqrt((lam / n) / denom)
    radius_sq = (m_radius * eps_n) ** 2
    total = 0.0
    for r in range(reps_outer):
        y = a * f0_head + _stream(seed, 2 * r).standard_normal(k) / math.sqrt(n)
        dev = gain * y - f0_head
        if k == 0:
            total += 1.0 if tail_sq > radius_sq else 0.0
            continue
        noise = _stream(seed, 2 * r + 1).standard_normal((reps_inner, k))
        total += count_outside(dev, sd, tail_sq, radius_sq, noise) / reps_inner
    return total / reps_outer
