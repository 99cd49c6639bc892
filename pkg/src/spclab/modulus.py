"""Modulus of continuity and its approximation-theoretic bounds.

The modulus at f0 over a subspace S with residual budget delta is

    sup { |f - f0| : f in S, |H^{1/2}(f - f0)| <= delta }.

On diagonal problems with singular subspaces the supremum has a closed
form; the general case is a convex-quadratic maximization over an ellipsoid
slice, solved exactly by eigendecomposition of the constraint form plus a
monotone root find in the Lagrange multiplier (boundary solution, with the
standard hard-case branch when the gradient has no component along the
softest constraint direction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .indexfn import IndexFunction
from .spectra import MatrixProblem, SequenceProblem, SpectrumModel
from .truncation import BoundConstants, select_level_modulus

__all__ = [
    "SubspaceSpec",
    "ModulusResult",
    "OptimizedModulusBound",
    "EnrichedModulusBound",
    "JacksonBernsteinReport",
    "modulus_exact_diagonal",
    "modulus_numeric",
    "degree_of_approximation",
    "modulus_of_injectivity",
    "jackson_bernstein_check",
    "modulus_bound",
    "modulus_bound_optimized",
    "modulus_bound_enriched",
]


@dataclass(frozen=True)
class SubspaceSpec:
    """Singular subspace of dimension k, or an explicit orthonormal basis."""

    k: int = 0
    basis: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.basis is not None:
            b = np.asarray(self.basis, dtype=float)
            if b.ndim != 2:
                raise ValueError("explicit basis must be an (N, k) array")
            gram = b.T @ b
            if np.abs(gram - np.eye(b.shape[1])).max() > 1e-10:
                raise ValueError("explicit basis columns must be orthonormal")
            object.__setattr__(self, "basis", b)
            object.__setattr__(self, "k", b.shape[1])
        elif self.k < 0:
            raise ValueError("subspace dimension must be nonnegative")

    def resolve(self, n_dim: int) -> np.ndarray:
        if self.basis is not None:
            return self.basis
        if self.k > n_dim:
            raise ValueError("subspace dimension exceeds the ambient dimension")
        return np.eye(n_dim)[:, : self.k]


@dataclass(frozen=True)
class ModulusResult:
    value: float
    feasible: bool
    maximizer: np.ndarray | None
    k: int
    delta: float


def modulus_exact_diagonal(
    forward: SpectrumModel, f0, k: int, delta: float
) -> ModulusResult:
    """Closed-form modulus for diagonal H and the k-th singular subspace.

    Coordinates beyond k are pinned at zero, which costs tail energy
    T^2 = sum_{j>k} s_j f0_j^2 out of the budget delta^2; the remainder is
    spent entirely on the in-subspace direction with the smallest singular
    value.  An exhausted budget (delta^2 < T^2) makes the constraint set
    empty: value 0, flagged infeasible.
    """
    f0 = np.asarray(f0, dtype=float)
    n_dim = f0.size
    if not 0 <= k <= n_dim:
        raise ValueError("subspace dimension out of range")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    s = forward.values(n_dim)
    tail_constraint = float(np.sum(s[k:] * f0[k:] ** 2))
    tail_energy = float(np.sum(f0[k:] ** 2))
    budget = delta**2 - tail_constraint
    if budget < -1e-14 * max(delta**2, tail_constraint):
        return ModulusResult(0.0, False, None, k, delta)
    budget = max(budget, 0.0)
    if k == 0:
        return ModulusResult(math.sqrt(tail_energy), True, np.zeros(n_dim), k, delta)
    value = math.sqrt(tail_energy + budget / s[k - 1])
    maximizer = f0.copy()
    maximizer[k:] = 0.0
    maximizer[k - 1] += math.sqrt(budget / s[k - 1])
    return ModulusResult(value, True, maximizer, k, delta)


def _dense_h(problem) -> tuple[np.ndarray, np.ndarray]:
    """(H, f0) for either problem flavor."""
    if isinstance(problem, MatrixProblem):
        return problem.h, problem.f0
    if isinstance(problem, SequenceProblem):
        return np.diag(problem.s_forward), problem.f0
    raise TypeError("expected a SequenceProblem or MatrixProblem")


def modulus_numeric(problem, sub: SubspaceSpec, delta: float, f0=None) -> ModulusResult:
    """Exact maximizer of the modulus by spectral reduction.

    Parametrizing f = V z over the orthonormal basis V, the constraint is an
    ellipsoid in z and the objective a convex quadratic, so the maximum sits
    on the constraint boundary.  In the eigenbasis of the constraint form
    the stationarity system is diagonal and the multiplier solves a strictly
    decreasing scalar equation.
    """
    h, default_f0 = _dense_h(problem)
    f0 = default_f0 if f0 is None else np.asarray(f0, dtype=float)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    v = sub.resolve(f0.size)
    k = v.shape[1]
    if k == 0:
        ok = float(f0 @ (h @ f0)) <= delta**2 * (1 + 1e-10) + 1e-300
        val = float(np.linalg.norm(f0)) if ok else 0.0
        return ModulusResult(val, ok, np.zeros(f0.size) if ok else None, 0, delta)
    g = v.T @ h @ v
    g = 0.5 * (g + g.T)
    b = v.T @ (h @ f0)
    c0 = float(f0 @ (h @ f0))
    z_center = np.linalg.solve(g, b)
    qmin = c0 - float(b @ z_center)
    r2 = delta**2 - qmin
    if r2 < -1e-10 * max(1.0, c0):
        return ModulusResult(0.0, False, None, k, delta)
    r2 = max(r2, 0.0)
    u = v.T @ f0
    d = z_center - u
    gw, gq = np.linalg.eigh(g)  # ascending
    e = gq.T @ d
    if r2 == 0.0:
        z = z_center
    else:
        z = z_center + gq @ _boundary_maximizer(gw, e, r2)
    f = v @ z
    value = float(np.linalg.norm(f - f0))
    return ModulusResult(value, True, f, k, delta)


def _boundary_maximizer(gw: np.ndarray, e: np.ndarray, r2: float) -> np.ndarray:
    """Maximize |y + e|^2 subject to sum g_i y_i^2 = r2 (g ascending > 0).

    Stationarity gives y_i = e_i / (lam * g_i - 1); the global maximum needs
    lam >= 1 / g_min, where the constraint value is strictly decreasing in
    lam.  When e has no mass on the softest eigendirections the root may not
    exist (hard case): the multiplier pins to the pole and the leftover
    budget goes to the softest direction.
    """
    g_min = gw[0]
    pole = 1.0 / g_min
    soft = gw <= g_min * (1.0 + 1e-12)
    hard_mass = float(np.sum(gw[soft] * e[soft] ** 2))

    def constraint(lam: float) -> float:
        denom = lam * gw - 1.0
        return float(np.sum(gw * e**2 / denom**2))

    scale = float(np.sum(np.abs(e))) + math.sqrt(r2 / g_min)
    if hard_mass <= 1e-28 * max(scale, 1.0) ** 2 * g_min:
        # Hard case: solve on the stiff block at the pole, fill the rest.
        stiff = ~soft
        y = np.zeros_like(e)
        if np.any(stiff):
            y[stiff] = e[stiff] / (pole * gw[stiff] - 1.0)
            used = float(np.sum(gw[stiff] * y[stiff] ** 2))
        else:
            used = 0.0
        if used <= r2:
            y[np.argmin(gw)] = math.sqrt(max(r2 - used, 0.0) / g_min)
            return y
        # Even at the pole the stiff block overshoots: root is beyond it.
    lo = pole * (1.0 + 1e-14) + 1e-300
    while constraint(lo) <= r2:
        # Degenerate start (constraint already below target): nudge toward pole.
        lo = pole + (lo - pole) / 2.0
        if lo - pole < 1e-25 * pole:
            break
    hi = lo * 2.0 + 1.0
    while constraint(hi) > r2:
        hi = hi * 4.0
        if hi > 1e200:
            raise RuntimeError("multiplier bracket expansion failed")
    lam = brentq(lambda L: constraint(L) - r2, lo, hi, xtol=1e-300, rtol=1e-15, maxiter=400)
    return e / (lam * gw - 1.0)


def degree_of_approximation(op, sub: SubspaceSpec | int, ambient: int | None = None) -> float:
    """Operator norm of H^{1/2} (I - P_k).

    Diagonal spectra with singular subspaces: exactly s_{k+1}^{1/2} (zero at
    the ambient dimension).  Dense operators with any subspace: the largest
    singular value of H^{1/2} restricted to the orthocomplement.
    """
    if isinstance(op, SpectrumModel):
        k = sub if isinstance(sub, int) else sub.k
        if k < 0:
            raise ValueError("subspace dimension must be nonnegative")
        if ambient is not None and k >= ambient:
            return 0.0
        return math.sqrt(op.value(k + 1))
    h = np.asarray(op, dtype=float)
    v = sub.resolve(h.shape[0]) if isinstance(sub, SubspaceSpec) else np.eye(h.shape[0])[:, :sub]
    n_dim = h.shape[0]
    proj = np.eye(n_dim) - v @ v.T
    m = proj @ h @ proj
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    return math.sqrt(max(float(w[-1]), 0.0))


def modulus_of_injectivity(op, sub: SubspaceSpec | int) -> float:
    """Smallest amplification of H^{1/2} on the subspace; rejects dimension 0."""
    if isinstance(op, SpectrumModel):
        k = sub if isinstance(sub, int) else sub.k
        if k < 1:
            raise ValueError("modulus of injectivity needs a nonzero subspace")
        return math.sqrt(op.value(k))
    h = np.asarray(op, dtype=float)
    v = sub.resolve(h.shape[0]) if isinstance(sub, SubspaceSpec) else np.eye(h.shape[0])[:, :sub]
    if v.shape[1] < 1:
        raise ValueError("modulus of injectivity needs a nonzero subspace")
    m = v.T @ h @ v
    w = np.linalg.eigvalsh(0.5 * (m + m.T))
    return math.sqrt(max(float(w[0]), 0.0))


@dataclass(frozen=True)
class JacksonBernsteinReport:
    jackson: float
    bernstein: float
    approx_power: float
    rows: list
    approx_exceeds_radius: bool


def jackson_bernstein_check(
    h, subspaces: list[SubspaceSpec], phi: IndexFunction, f0, radius: float = 1.0
) -> JacksonBernsteinReport:
    """Smallest constants making the three subspace inequalities hold.

    For each subspace X_k in the sequence: the degree of approximation is
    compared against s_{k+1}^{1/2}, the modulus of injectivity against
    s_k^{1/2}, and the projection error of f0 against phi(s_{k+1}).  A truth
    inside the source set of the given radius keeps the approximation-power
    constant below that radius at every k; exceeding it anywhere is reported
    as a violation (the truth is rougher than phi admits).
    """
    h = np.asarray(h, dtype=float)
    f0 = np.asarray(f0, dtype=float)
    svals = np.linalg.eigvalsh(h)[::-1]
    rows = []
    for spec_k in subspaces:
        v = spec_k.resolve(h.shape[0])
        k = v.shape[1]
        if k < 1 or k >= h.shape[0]:
            raise ValueError("subspace scan needs 1 <= k < N")
        rho = degree_of_approximation(h, spec_k)
        inj = modulus_of_injectivity(h, spec_k)
        perr = float(np.linalg.norm(f0 - v @ (v.T @ f0)))
        phi_next = float(phi._value_at(np.asarray(svals[k])))
        rows.append(
            {
                "k": k,
                "jackson": rho / math.sqrt(svals[k]),
                "bernstein": math.sqrt(svals[k - 1]) / inj if inj > 0 else math.inf,
                "approx_power": perr / phi_next if phi_next > 0 else math.inf,
            }
        )
    approx_power = max(r["approx_power"] for r in rows)
    return JacksonBernsteinReport(
        jackson=max(r["jackson"] for r in rows),
        bernstein=max(r["bernstein"] for r in rows),
        approx_power=approx_power,
        rows=rows,
        approx_exceeds_radius=approx_power > radius * (1 + 1e-8),
    )


def modulus_bound(
    phi: IndexFunction,
    forward: SpectrumModel,
    k: int,
    delta: float,
    constants: BoundConstants | None = None,
) -> float:
    """Two-term modulus bound M (1 + C_P C_B) phi(s_{k+1}) + C_B delta / sqrt(s_k)."""
    if k < 1:
        raise ValueError("the bound needs k >= 1")
    consts = constants or BoundConstants()
    s_next = forward.value(k + 1)
    s_k = forward.value(k)
    smooth = consts.approx_power * (1.0 + consts.jackson * consts.bernstein)
    head = smooth * float(phi._value_at(np.asarray(s_next))) if s_next > 0 else 0.0
    return head + consts.bernstein * delta / math.sqrt(s_k)


@dataclass(frozen=True)
class OptimizedModulusBound:
    k_delta: int
    bound: float
    degenerate: bool


def modulus_bound_optimized(
    phi: IndexFunction,
    forward: SpectrumModel,
    delta: float,
    constants: BoundConstants | None = None,
    jmax: int | None = None,
) -> OptimizedModulusBound:
    """Bound at the budget-adapted level: c * phi(Theta_phi^{-1}(delta)).

    The level keeps indices with Theta_phi(s_j) strictly above delta; the
    guarantee is asymptotic in delta, and the value is exposed for every
    delta with a degenerate flag when no index qualifies.
    """
    consts = constants or BoundConstants()
    theta = phi.theta()
    k_delta = select_level_modulus(theta, forward, delta, jmax=jmax)
    t = theta.invert(delta)
    bound = consts.effective_modulus_factor() * float(phi._value_at(np.asarray(t)))
    return OptimizedModulusBound(k_delta, bound, degenerate=k_delta == 0)


@dataclass(frozen=True)
class EnrichedModulusBound:
    bound: float
    rho_term: float
    base_bound: float
    k_delta: int
    rho_dominates: bool


def modulus_bound_enriched(
    phi: IndexFunction,
    forward: SpectrumModel,
    delta: float,
    rho_seq,
    constants: BoundConstants | None = None,
    jmax: int | None = None,
) -> EnrichedModulusBound:
    """Bound over the enriched set {f : |(I-P_k) f| <= rho_k} at k = k_delta.

    Adds the enrichment allowance rho_{k_delta} to the optimized bound, and
    reports when the allowance dominates (the proportionality condition on
    rho is then violated at this budget).
    """
    base = modulus_bound_optimized(phi, forward, delta, constants, jmax=jmax)
    if callable(rho_seq):
        rho_k = float(rho_seq(base.k_delta))
    else:
        arr = np.asarray(rho_seq, dtype=float)
        if base.k_delta >= arr.size:
            raise ValueError("rho sequence too short for the selected level")
        rho_k = float(arr[base.k_delta])
    if rho_k < 0:
        raise ValueError("enrichment sequence must be nonnegative")
    return EnrichedModulusBound(
        bound=rho_k + base.bound,
        rho_term=rho_k,
        base_bound=base.bound,
        k_delta=base.k_delta,
        rho_dominates=rho_k > base.bound,
    )
