import math

import numpy as np
import pytest

from spclab.harness import fit_loglog
from spclab.indexfn import power
from spclab.modulus import (
    SubspaceSpec,
    degree_of_approximation,
    jackson_bernstein_check,
    modulus_bound,
    modulus_bound_enriched,
    modulus_bound_optimized,
    modulus_exact_diagonal,
    modulus_numeric,
    modulus_of_injectivity,
)
from spclab.spectra import (
    SequenceProblem,
    explicit_spectrum,
    exponential_spectrum,
    logarithmic_spectrum,
    make_noncommuting_problem,
    power_spectrum,
    source_phi,
)
from spclab.truncation import BoundConstants


def diagonal_problem(f0, n=1.0):
    size = len(f0)
    return SequenceProblem(
        size, power_spectrum(1.0), explicit_spectrum([1.0] * size), np.asarray(f0, float), n
    )


def test_exact_diagonal_example():
    fwd = power_spectrum(1.0)
    f0 = np.array([1.0, 0.5, 0.25, 0.0, 0.0])
    res = modulus_exact_diagonal(fwd, f0, 2, math.sqrt(0.01))
    # tail constraint (0.25^2)/9, budget on direction 2 with s_2 = 1/4
    want_sq = 0.0625 + (0.01 - 0.0625 / 9.0) / 0.25
    assert res.feasible
    assert res.value == pytest.approx(math.sqrt(want_sq), rel=1e-9)
    assert res.value == pytest.approx(0.273354, abs=1e-6)


def test_exact_diagonal_edges():
    fwd = power_spectrum(1.0)
    f0 = np.array([0.7, 0.3, 0.0, 0.0])
    # truth supported inside the subspace, zero budget: only f = f0 remains
    res = modulus_exact_diagonal(fwd, f0, 2, 0.0)
    assert res.feasible and res.value == 0.0
    # budget exactly the tail cost: value equals the tail energy
    f1 = np.array([0.7, 0.3, 0.2, 0.0])
    t_sq = fwd.value(3) * 0.2**2
    res2 = modulus_exact_diagonal(fwd, f1, 2, math.sqrt(t_sq))
    assert res2.feasible
    assert res2.value == pytest.approx(0.2, rel=1e-12)
    # exhausted budget: infeasible, not an error
    res3 = modulus_exact_diagonal(fwd, f1, 2, math.sqrt(t_sq) / 2.0)
    assert not res3.feasible and res3.value == 0.0
    res4 = modulus_exact_diagonal(fwd, f1, 0, 1e-6)
    assert not res4.feasible


def test_numeric_matches_closed_form_random(rng):
    fwd = power_spectrum(1.0)
    for _ in range(50):
        size = int(rng.integers(4, 30))
        f0 = rng.standard_normal(size)
        k = int(rng.integers(1, size))
        delta = float(rng.uniform(0.01, 2.0))
        exact = modulus_exact_diagonal(fwd, f0, k, delta)
        prob = diagonal_problem(f0)
        num = modulus_numeric(prob, SubspaceSpec(k=k), delta)
        assert num.feasible == exact.feasible
        if exact.feasible:
            assert num.value == pytest.approx(exact.value, rel=1e-6)


def test_numeric_dense_commuting_matches_diagonal(rng):
    fwd = power_spectrum(1.0)
    for seed in range(6):
        size = 25
        f0 = rng.standard_normal(size) / np.arange(1, size + 1)
        mp = make_noncommuting_problem(size, fwd, 0.5, 0.0, seed=seed, f0=f0)
        k = int(rng.integers(1, size))
        delta = float(rng.uniform(0.05, 1.0))
        exact = modulus_exact_diagonal(fwd, f0, k, delta)
        num = modulus_numeric(mp, SubspaceSpec(k=k), delta)
        assert num.feasible == exact.feasible
        if exact.feasible:
            assert num.value == pytest.approx(exact.value, rel=1e-6)


def test_numeric_maximizer_reaches_constraint_boundary():
    fwd = power_spectrum(1.0)
    f0 = np.array([0.3, -0.2, 0.5, 0.1, 0.0, 0.0])
    prob = diagonal_problem(f0)
    res = modulus_numeric(prob, SubspaceSpec(k=3), 0.2)
    h = np.diag(fwd.values(6))
    used = (res.maximizer - f0) @ h @ (res.maximizer - f0)
    assert used == pytest.approx(0.04, rel=1e-8)
    assert np.allclose(res.maximizer[3:], 0.0)


def test_modulus_monotone_in_budget_and_dimension():
    fwd = power_spectrum(1.0)
    f0 = np.array([1.0, 0.6, 0.3, 0.15, 0.05])
    vals_delta = [
        modulus_exact_diagonal(fwd, f0, 3, d).value for d in (0.1, 0.2, 0.4, 0.8)
    ]
    assert all(b >= a for a, b in zip(vals_delta, vals_delta[1:]))
    vals_k = [modulus_exact_diagonal(fwd, f0, k, 0.5).value for k in (1, 2, 3, 4)]
    assert all(b >= a - 1e-12 for a, b in zip(vals_k, vals_k[1:]))


def test_degree_and_injectivity_examples():
    fwd = power_spectrum(1.0)
    assert degree_of_approximation(fwd, 3) == pytest.approx(0.25)
    assert degree_of_approximation(fwd, 10, ambient=10) == 0.0
    assert modulus_of_injectivity(fwd, 3) == pytest.approx(1.0 / 3.0)
    assert modulus_of_injectivity(fwd, 1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        modulus_of_injectivity(fwd, 0)


def test_singular_subspace_identities_dense():
    # On the diagonal surrogate with singular subspaces the three quantities
    # hit their closed forms exactly.
    fwd = power_spectrum(1.0)
    mp = make_noncommuting_problem(20, fwd, 0.5, 0.0, seed=0)
    phi = power(0.5)
    for k in (1, 4, 9):
        assert degree_of_approximation(mp.h, SubspaceSpec(k=k)) == pytest.approx(
            math.sqrt(fwd.value(k + 1)), abs=1e-10
        )
        assert modulus_of_injectivity(mp.h, SubspaceSpec(k=k)) == pytest.approx(
            math.sqrt(fwd.value(k)), abs=1e-10
        )
        # projection error of phi(H) equals phi(s_{k+1})
        proj_err = max(
            phi(s) for s in fwd.values(20)[k:]
        )
        assert proj_err == pytest.approx(phi(fwd.value(k + 1)), rel=1e-12)


def test_rotated_subspace_cannot_beat_singular(rng):
    # Kolmogorov-width optimality: any k-dimensional subspace has degree of
    # approximation at least s_{k+1}^{1/2}.
    fwd = power_spectrum(1.0)
    mp = make_noncommuting_problem(15, fwd, 0.5, 0.0, seed=0)
    k = 4
    q, _ = np.linalg.qr(rng.standard_normal((15, k)))
    val = degree_of_approximation(mp.h, SubspaceSpec(basis=q))
    assert val >= math.sqrt(fwd.value(k + 1)) - 1e-10


def test_jackson_bernstein_singular_and_rough():
    fwd = power_spectrum(1.0)
    mp = make_noncommuting_problem(30, fwd, 0.5, 0.0, seed=1)
    subs = [SubspaceSpec(k=k) for k in range(1, 12)]
    phi = power(0.5)
    v = np.ones(30) / math.sqrt(30)
    f0 = np.sqrt(np.diag(mp.h)) * v
    rep = jackson_bernstein_check(mp.h, subs, phi, f0)
    assert rep.jackson <= 1.0 + 1e-8
    assert rep.bernstein <= 1.0 + 1e-8
    assert rep.approx_power <= 1.0 + 1e-8
    assert not rep.approx_exceeds_radius
    rough = np.diag(mp.h) ** 0.25 * v  # too-rough truth: outside the class
    rep2 = jackson_bernstein_check(mp.h, subs, phi, rough)
    assert rep2.approx_exceeds_radius
    ratios = [r["approx_power"] for r in rep2.rows]
    assert ratios[-1] > ratios[0]


def test_jackson_bernstein_noncommuting_finite():
    fwd = power_spectrum(1.0)
    mp = make_noncommuting_problem(40, fwd, 1.0, 0.5, seed=7)
    subs = [SubspaceSpec(basis=mp.lf_eigvecs[:, :k]) for k in range(1, 16)]
    phi = power(0.5)
    v = np.ones(40) / math.sqrt(40)
    f0 = np.sqrt(np.diag(mp.h)) * v
    rep = jackson_bernstein_check(mp.h, subs, phi, f0)
    assert math.isfinite(rep.jackson)
    assert math.isfinite(rep.bernstein)
    assert math.isfinite(rep.approx_power)


def test_modulus_bound_examples():
    fwd = power_spectrum(1.0)
    consts = BoundConstants()
    # phi = sqrt, s_j = j^{-2}, k = 4, delta = 0.05: 2/5 + 0.05 * 4
    assert modulus_bound(power(0.5), fwd, 4, 0.05, consts) == pytest.approx(0.6)
    assert modulus_bound(power(0.5), fwd, 4, 0.0, consts) == pytest.approx(0.4)
    with pytest.raises(ValueError):
        modulus_bound(power(0.5), fwd, 0, 0.1, consts)


def test_modulus_bound_dominates_exact(rng):
    # f0 = phi(H) v with |v| <= 1 stays below the two-term bound.
    fwd = power_spectrum(1.0)
    phi = power(0.5)
    size = 60
    svals = fwd.values(size)
    for _ in range(100):
        v = rng.standard_normal(size)
        v /= np.linalg.norm(v) * float(rng.uniform(1.0, 3.0))
        f0 = np.array([phi(s) for s in svals]) * v
        k = int(rng.integers(1, 20))
        delta = float(rng.uniform(1e-4, 0.5))
        exact = modulus_exact_diagonal(fwd, f0, k, delta)
        if exact.feasible:
            assert modulus_bound(phi, fwd, k, delta) >= exact.value - 1e-12


def test_modulus_bound_optimized_moderate_slope():
    fwd = power_spectrum(1.0)
    phi = source_phi(fwd, 1.0)  # beta = p = 1: bound ~ delta^{1/2}
    pts = []
    for d in np.geomspace(1e-2, 1e-8, 7):
        res = modulus_bound_optimized(phi, fwd, float(d))
        assert not res.degenerate
        pts.append((float(d), res.bound))
    assert fit_loglog(pts).slope == pytest.approx(0.5, abs=0.02)


def test_modulus_bound_optimized_severe_and_mild_shapes():
    sev = exponential_spectrum(1.0, 1.0)
    phi_s = source_phi(sev, 1.0)
    pts = [
        (math.log(1.0 / d), modulus_bound_optimized(phi_s, sev, d).bound)
        for d in (10.0**-e for e in range(30, 91, 10))
    ]
    assert fit_loglog(pts).slope == pytest.approx(-1.0, abs=0.05)
    mild = logarithmic_spectrum(1.0)
    phi_m = source_phi(mild, 1.0)
    pts = [
        (math.log(1.0 / d), modulus_bound_optimized(phi_m, mild, d, jmax=10**300).bound / d)
        for d in (10.0**-e for e in range(100, 281, 30))
    ]
    assert fit_loglog(pts).slope == pytest.approx(1.0, abs=0.05)


def test_modulus_bound_optimized_degenerate_flag():
    fwd = power_spectrum(1.0)
    res = modulus_bound_optimized(power(0.5), fwd, 1.0)  # delta >= Theta(s_1)
    assert res.degenerate and res.k_delta == 0


def test_enriched_bound():
    fwd = power_spectrum(1.0)
    phi = source_phi(fwd, 1.0)
    delta = 1e-3
    base = modulus_bound_optimized(phi, fwd, delta)
    zero = modulus_bound_enriched(phi, fwd, delta, lambda k: 0.0)
    assert zero.bound == pytest.approx(base.bound)
    assert not zero.rho_dominates
    # rho_k = phi(s_{k+1}): comparable allowance, bound within a factor two
    rho = lambda k: phi(fwd.value(k + 1))
    prop = modulus_bound_enriched(phi, fwd, delta, rho)
    assert prop.bound <= 2.0 * base.bound
    flat = modulus_bound_enriched(phi, fwd, delta, lambda k: 1.0)
    assert flat.rho_dominates
