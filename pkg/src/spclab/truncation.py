"""Truncation-level selection and the optimized contraction bound.

The selector for the direct problem keeps every index whose prior-adjusted
signal strength psi^2(s_j) strictly exceeds both the regularization floor
psi^2(1/n) and the per-coordinate noise cost j/n; the modulus selector keeps
indices with Theta_phi(s_j) strictly above the residual budget delta.  Both
conditions are prefix properties (the left side is non-increasing, the right
side non-decreasing), so the largest qualifying index over the scan range is
found by doubling plus bisection; this is equivalent to a literal scan for
every spectrum satisfying the monotonicity invariants.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .indexfn import IndexFunction, OutOfRangeError
from .spectra import (
    SpectrumModel,
    check_balance_condition,
    decay_ratio_check,
)


__all__ = [
    "BoundConstants",
    "TruncationDecision",
    "MinimaxResult",
    "ScanExhaustedError",
    "select_level",
    "select_level_modulus",
    "contraction_bound",
    "classify_dominance",
    "series_minimax_risk",
    "inverse_rate",
    "default_jmax",
]

REGULARIZATION_BIAS = "regularization_bias"
VARIANCE_TERM = "variance_term"


class ScanExhaustedError(RuntimeError):
    """The defining condition still holds at the scan ceiling."""


def _psi_sq(psi: IndexFunction, s: float) -> float:
    """psi(s)^2 with below-range arguments treated as zero.

    Composed index functions cannot be evaluated once the inner inversion
    target drops under the floating-point floor; since psi is
    non-decreasing with psi(0+) = 0, such values compare as zero against
    any attainable threshold.
    """
    if s <= 0.0:
        return 0.0
    try:
        return float(psi._value_at(np.asarray(s))) ** 2
    except OutOfRangeError:
        return 0.0


@dataclass(frozen=True)
class BoundConstants:
    """User-settable constants entering the explicit bounds.

    spc_factor      multiplier in the optimized contraction bound (>= 2)
    decay_ratio     bound on s_j/s_{j+1} (> 1)
    balance         constant in the variance-dominance condition (>= 1)
    envelope        width of the admissible rate envelope (>= 2)
    approx_power    approximation-power constant (>= 1)
    jackson         Jackson-inequality constant (>= 1)
    bernstein       Bernstein-inequality constant (>= 1)
    modulus_factor  multiplier in the optimized modulus bound; derived from
                    the three subspace constants when left unset
    enriched_factor multiplier for the enriched-set bound; reported only
    """

    spc_factor: float = 2.0
    decay_ratio: float = 2.0
    balance: float = 1.0
    envelope: float = 2.0
    approx_power: float = 1.0
    jackson: float = 1.0
    bernstein: float = 1.0
    modulus_factor: float | None = None
    enriched_factor: float | None = None

    def __post_init__(self) -> None:
        if self.spc_factor < 2.0:
            raise ValueError("spc_factor must be >= 2")
        if self.decay_ratio <= 1.0:
            raise ValueError("decay_ratio must exceed 1")
        if self.balance < 1.0:
            raise ValueError("balance must be >= 1")
        if self.envelope < 2.0:
            raise ValueError("envelope must be >= 2")
        for name in ("approx_power", "jackson", "bernstein"):
            if getattr(self, name) < 1.0:
                raise ValueError(f"{name} must be >= 1")

    def effective_modulus_factor(self) -> float:
        if self.modulus_factor is not None:
            return self.modulus_factor
        return 2.0 * max(self.approx_power * (1.0 + self.jackson * self.bernstein), self.bernstein)


@dataclass(frozen=True)
class TruncationDecision:
    """Chosen level with the dominant error source and the bound value.

    kernel is the constant-free max{psi^2(1/n), level/n}; spc_bound is
    4 * spc_factor * kernel and delta its square root.  degenerate marks the
    empty-selector edge case (level 0), which the definitions do not cover
    but small n can produce.
    """

    level: int
    dominant: str
    kernel: float
    spc_bound: float
    delta: float
    degenerate: bool = False


def default_jmax(spectrum: SpectrumModel) -> int:
    """Scan ceiling: generous for polynomial level growth, tight for log growth."""
    fam = spectrum.family
    if fam in ("exponential", "analytic"):
        return 10**4
    if fam == "product":
        return min(default_jmax(c) for c in spectrum.children)
    if fam == "explicit":
        return len(spectrum.data)
    return 10**7


def _largest_true(cond, jmax: int) -> int | None:
    """Largest j in [1, jmax] with cond(j) true, None if cond(1) is false.

    Assumes cond is a prefix property; raises ScanExhaustedError when the
    condition still holds at jmax.
    """
    if not cond(1):
        return None
    if cond(jmax):
        raise ScanExhaustedError(
            f"selector condition still holds at the scan ceiling {jmax}; raise jmax"
        )
    lo = 1
    hi = 2
    while hi < jmax and cond(hi):
        lo = hi
        hi = min(hi * 2, jmax)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if cond(mid):
            lo = mid
        else:
            hi = mid
    return lo


def select_level(
    psi: IndexFunction,
    spectrum: SpectrumModel,
    n: float,
    jmax: int | None = None,
    constants: BoundConstants | None = None,
) -> TruncationDecision:
    """Optimal truncation level for the direct problem at noise level n.

    Largest j with psi^2(s_j) > max{psi^2(1/n), j/n} (strict; ties excluded).
    Returns level 0 with the degenerate flag when no index qualifies.
    """
    if not n > 0:
        raise ValueError("noise level n must be positive")
    if jmax is None:
        jmax = default_jmax(spectrum)
    consts = constants or BoundConstants()
    floor = float(psi(1.0 / n)) ** 2

    def cond(j: int) -> bool:
        return _psi_sq(psi, spectrum.value(j)) > max(floor, j / n)

    level = _largest_true(cond, jmax)
    if level is None:
        bound = 4.0 * consts.spc_factor * floor
        return TruncationDecision(
            0, REGULARIZATION_BIAS, floor, bound, math.sqrt(bound), degenerate=True
        )
    kernel = max(floor, level / n)
    dominant = REGULARIZATION_BIAS if floor >= level / n else VARIANCE_TERM
    bound = 4.0 * consts.spc_factor * kernel
    return TruncationDecision(level, dominant, kernel, bound, math.sqrt(bound))


def select_level_modulus(
    theta_phi: IndexFunction,
    forward: SpectrumModel,
    delta: float,
    jmax: int | None = None,
) -> int:
    """Truncation level for the modulus: largest j with Theta_phi(s_j) > delta."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    if jmax is None:
        jmax = default_jmax(forward)

    def cond(j: int) -> bool:
        s = forward.value(j)
        if s <= 0.0:
            return False
        return float(theta_phi._value_at(np.asarray(s))) > delta

    level = _largest_true(cond, jmax)
    return 0 if level is None else level


def contraction_bound(
    decision: TruncationDecision,
    psi: IndexFunction,
    n: float,
    constants: BoundConstants | None = None,
) -> float:
    """Optimized squared-contraction bound 4 * spc_factor * max{psi^2(1/n), k/n}."""
    consts = constants or BoundConstants()
    kernel = max(float(psi(1.0 / n)) ** 2, decision.level / n)
    return 4.0 * consts.spc_factor * kernel


def classify_dominance(
    psi: IndexFunction,
    spectrum: SpectrumModel,
    n_grid,
    constants: BoundConstants | None = None,
    jmax: int | None = None,
) -> list[str]:
    """Which term dominates the optimized bound, per noise level.

    When the decay-ratio condition holds the verdict is determined once from
    the balance condition psi^2(s_j) <= c * j * s_j and applies to every n;
    otherwise the two terms are compared directly at each n using the
    variance-balancing level.
    """
    n_grid = list(n_grid)
    if decay_ratio_check(spectrum).holds:
        balanced = check_balance_condition(psi, spectrum)
        verdict = VARIANCE_TERM if balanced.holds else REGULARIZATION_BIAS
        return [verdict] * len(n_grid)
    out = []
    if jmax is None:
        jmax = default_jmax(spectrum)
    for n in n_grid:
        floor = float(psi(1.0 / n)) ** 2

        def cond(j: int) -> bool:
            return _psi_sq(psi, spectrum.value(j)) > j / n

        l_n = _largest_true(cond, jmax) or 0
        out.append(REGULARIZATION_BIAS if floor > l_n / n else VARIANCE_TERM)
    return out


@dataclass(frozen=True)
class MinimaxResult:
    k_star: int
    risk: float
    at_boundary: bool


def series_minimax_risk(
    psi: IndexFunction,
    spectrum: SpectrumModel,
    n: float,
    jmax: int | None = None,
) -> MinimaxResult:
    """Best truncated-series risk inf_k { psi^2(s_{k+1}) + k/n }.

    Scans k = 0, 1, ... with early stop once k/n alone exceeds the running
    minimum (the objective is bounded below by k/n, so no later k can win).
    Ties break toward the smaller k.  A minimizer at the scan ceiling is
    reported with a warning flag.
    """
    if not n > 0:
        raise ValueError("noise level n must be positive")
    if jmax is None:
        jmax = default_jmax(spectrum)
    best_k = 0
    best = math.inf
    chunk = 4096
    k = 0
    while k <= jmax:
        hi = min(k + chunk, jmax + 1)
        ks = np.arange(k, hi)
        svals = spectrum.values(int(hi) + 1)[ks]  # s_{k+1} for k in ks
        # Clamp before the vectorized evaluation; the clamp error is of the
        # order psi^2 at the floating-point floor and cannot move the argmin.
        with np.errstate(under="ignore"):
            smooth = np.where(
                svals > 1e-300,
                np.asarray(psi._value_at(np.maximum(svals, 1e-300))) ** 2,
                0.0,
            )
        obj = smooth + ks / n
        i = int(np.argmin(obj))
        if obj[i] < best:
            best = float(obj[i])
            best_k = int(ks[i])
        k = hi
        if k / n > best:
            break
    at_boundary = best_k >= jmax
    if at_boundary:
        warnings.warn("series minimax minimizer at the scan ceiling", RuntimeWarning)
    return MinimaxResult(best_k, best, at_boundary)


def inverse_rate(phi: IndexFunction, delta: float, tol: float = 1e-12) -> float:
    """Reconstruction rate phi(Theta_phi^{-1}(delta)) for a direct rate delta."""
    theta = phi.theta()
    t = theta.invert(delta, tol=tol)
    return float(phi._value_at(np.asarray(t)))
