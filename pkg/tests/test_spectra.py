import math

import numpy as np
import pytest

from spclab.indexfn import compose_psi, power
from spclab.spectra import (
    SequenceProblem,
    alpha_regular_spectrum,
    analytic_spectrum,
    check_balance_condition,
    decay_ratio_check,
    explicit_spectrum,
    exponential_spectrum,
    link_chi,
    link_ratio_range,
    logarithmic_spectrum,
    make_noncommuting_problem,
    power_spectrum,
    product_spectrum,
    source_element,
    source_phi,
    truncation_tail_bound,
    weyl_link_ratios,
)


def all_families():
    return {
        "power": power_spectrum(1.0),
        "exponential": exponential_spectrum(1.0, 1.0),
        "logarithmic": logarithmic_spectrum(1.0),
        "alpha_regular": alpha_regular_spectrum(1.0),
        "analytic": analytic_spectrum(1.0, 1.0, 1.0),
        "explicit": explicit_spectrum([1.0, 0.5, 0.25, 0.125]),
        "product": product_spectrum(power_spectrum(1.0), alpha_regular_spectrum(1.0)),
    }


def test_singular_value_examples():
    assert power_spectrum(1.0).value(5) == pytest.approx(0.04)
    assert alpha_regular_spectrum(1.0).value(3) == pytest.approx(1.0 / 27)
    assert exponential_spectrum(1.0, 1.0).value(2) == pytest.approx(math.exp(-4))


def test_value_rejects_bad_index():
    with pytest.raises(ValueError):
        power_spectrum(1.0).value(0)


def test_explicit_validation_and_tail():
    with pytest.raises(ValueError):
        explicit_spectrum([1.0, 2.0])  # increasing
    with pytest.raises(ValueError):
        explicit_spectrum([1.0, -0.5])
    sp = explicit_spectrum([1.0, 0.1])
    assert sp.value(3) == 0.0
    np.testing.assert_allclose(sp.values(4), [1.0, 0.1, 0.0, 0.0])


@pytest.mark.parametrize("name", sorted(all_families()))
def test_monotone_non_increasing(name):
    model = all_families()[name]
    # geometric subsample of 1..1e5 keeps the scan cheap and representative
    idx = np.unique(np.geomspace(1, 10**5, 200).astype(int))
    vals = np.array([model.value(int(j)) for j in idx])
    assert np.all(vals >= 0.0)
    assert np.all(np.diff(vals) <= 1e-15 * np.maximum(vals[1:], 1e-300))


def test_decay_ratio_examples():
    chk = decay_ratio_check(power_spectrum(1.0))
    assert chk.holds and chk.c3 == pytest.approx(4.0)
    chk = decay_ratio_check(exponential_spectrum(1.0, 1.0))
    assert chk.holds and chk.c3 == pytest.approx(math.exp(2.0), rel=1e-12)
    assert not decay_ratio_check(exponential_spectrum(1.0, 2.0)).holds


def test_product_spectrum_examples():
    prod = product_spectrum(power_spectrum(1.0), alpha_regular_spectrum(1.0))
    assert prod.value(2) == pytest.approx(1.0 / 32)
    prod2 = product_spectrum(power_spectrum(1.0), analytic_spectrum(1.0, 1.0, 1.0))
    assert prod2.value(1) == pytest.approx(math.exp(-1.0))


def test_product_matches_dense_eigenvalues():
    # eps=0, a chosen so Lambda_f = H^{2a} has alpha-regular decay; then the
    # pushed-forward covariance spectrum must match the product formula.
    fwd = power_spectrum(1.0)
    alpha = 1.0
    a = (1.0 + 2.0 * alpha) / 4.0
    mp = make_noncommuting_problem(50, fwd, a, 0.0, seed=0)
    dense = np.linalg.eigvalsh(mp.lambda_g())[::-1]
    diag = product_spectrum(fwd, alpha_regular_spectrum(alpha)).values(50)
    np.testing.assert_allclose(dense, diag, rtol=1e-10)


def test_link_chi_identity_all_pairs():
    pairs = [
        (power_spectrum(1.0), alpha_regular_spectrum(1.0)),
        (power_spectrum(0.75), alpha_regular_spectrum(1.5)),
        (exponential_spectrum(1.0, 1.0), alpha_regular_spectrum(1.0)),
        (exponential_spectrum(0.25, 1.0), analytic_spectrum(0.25, 0.5, 1.0)),
        (logarithmic_spectrum(1.0), alpha_regular_spectrum(1.0)),
    ]
    for fwd, pri in pairs:
        chi = link_chi(fwd, pri)
        sh = fwd.values(200)
        slf = pri.values(200)
        got = np.array([chi(t) ** 2 for t in sh])
        np.testing.assert_allclose(got, slf, rtol=1e-9)


def test_source_phi_identity():
    for fwd in (power_spectrum(1.0), exponential_spectrum(1.0, 1.0), logarithmic_spectrum(1.0)):
        phi = source_phi(fwd, 1.3)
        sh = fwd.values(100)
        got = np.array([phi(t) for t in sh])
        np.testing.assert_allclose(got, np.arange(1, 101, dtype=float) ** -1.3, rtol=1e-9)


def test_noncommuting_builder_eps_zero_commutes():
    fwd = power_spectrum(1.0)
    mp = make_noncommuting_problem(50, fwd, 0.5, 0.0, seed=1)
    np.testing.assert_allclose(mp.lambda_f, mp.h, atol=1e-15)


def test_noncommuting_builder_eigenvalue_sandwich():
    fwd = power_spectrum(1.0)
    mp = make_noncommuting_problem(50, fwd, 1.0, 0.5, seed=7)
    ratios = mp.lf_eigvals / mp.h_eigvals**2.0
    assert ratios.min() >= 0.5 - 1e-9
    assert ratios.max() <= 1.5 + 1e-9


def test_noncommuting_builder_norm_equivalence():
    mp = make_noncommuting_problem(50, power_spectrum(1.0), 1.0, 0.5, seed=7)
    lo, hi = link_ratio_range(mp, half_power=0.5, trials=100, seed=5)
    assert lo >= 0.5 - 1e-9
    assert hi <= 1.5 + 1e-9


def test_noncommuting_builder_rejects_eps_one():
    with pytest.raises(ValueError):
        make_noncommuting_problem(10, power_spectrum(1.0), 1.0, 1.0, seed=0)


def test_weyl_link_ratios():
    fwd = power_spectrum(1.0)
    mp0 = make_noncommuting_problem(50, fwd, 1.0, 0.0, seed=0)
    chk0 = weyl_link_ratios(mp0, 50)
    np.testing.assert_allclose(chk0.ratios, 1.0, atol=1e-10)
    mp = make_noncommuting_problem(50, fwd, 1.0, 0.5, seed=7)
    chk = weyl_link_ratios(mp, 50)
    assert chk.within
    assert chk.lower == pytest.approx(math.sqrt(0.5))
    assert chk.upper == pytest.approx(math.sqrt(1.5))
    with pytest.raises(ValueError):
        weyl_link_ratios(mp, 51)


def test_strengthened_link_is_measured_not_asserted():
    mp = make_noncommuting_problem(50, power_spectrum(1.0), 1.0, 0.5, seed=7)
    lo, hi = link_ratio_range(mp, half_power=1.5, trials=100, seed=5)
    assert 0.0 < lo <= hi < math.inf


def test_balance_condition_examples():
    fwd = power_spectrum(1.0)

    def psi_for(alpha, beta):
        return compose_psi(source_phi(fwd, beta), link_chi(fwd, alpha_regular_spectrum(alpha)))

    lam = lambda alpha: product_spectrum(fwd, alpha_regular_spectrum(alpha))
    assert check_balance_condition(psi_for(1.0, 2.0), lam(1.0)).holds
    assert not check_balance_condition(psi_for(2.0, 1.0), lam(2.0)).holds
    eq = check_balance_condition(psi_for(1.0, 1.0), lam(1.0))
    assert eq.holds
    assert eq.c4 == pytest.approx(1.0, rel=1e-9)


def test_sequence_problem_validation_and_derived():
    fwd = power_spectrum(1.0)
    pri = alpha_regular_spectrum(1.0)
    f0 = np.array([1.0, 0.5, 0.25])
    prob = SequenceProblem(3, fwd, pri, f0, 10.0)
    np.testing.assert_allclose(prob.prior_variances, [1.0, 2.0**-5, 3.0**-5])
    np.testing.assert_allclose(prob.g0, np.sqrt(fwd.values(3)) * f0)
    with pytest.raises(ValueError):
        SequenceProblem(3, fwd, pri, f0, -1.0)
    with pytest.raises(ValueError):
        SequenceProblem(4, fwd, pri, f0, 1.0)


def test_explicit_continuous_extension():
    sp = explicit_spectrum([1.0, 0.25, 0.0625])
    # exact at integer indices, geometric in between and beyond the list
    for j in (1, 2, 3):
        assert sp.value_real(float(j)) == pytest.approx(sp.value(j), rel=1e-12)
    assert sp.value_real(1.5) == pytest.approx(0.5, rel=1e-12)
    assert sp.value_real(4.0) == pytest.approx(0.015625, rel=1e-12)
    assert sp.index_of_value(0.25) == pytest.approx(2.0, rel=1e-9)
    chi = link_chi(sp, explicit_spectrum([1.0, 0.125, 0.02]))
    got = [chi(t) ** 2 for t in sp.values(3)]
    np.testing.assert_allclose(got, [1.0, 0.125, 0.02], rtol=1e-9)


def test_source_element_and_tail_bound():
    fwd = power_spectrum(1.0)
    phi = source_phi(fwd, 1.0)
    f0 = source_element(fwd, phi, 500, radius=1.0, seed=9)
    # membership: f0 = phi(H) v with |v| = 1 means sum (f0_j/phi(s_j))^2 = 1
    v = f0 / np.array([phi(t) for t in fwd.values(500)])
    assert np.linalg.norm(v) == pytest.approx(1.0, rel=1e-12)
    t1 = truncation_tail_bound(fwd, phi, 100)
    t2 = truncation_tail_bound(fwd, phi, 1000)
    assert 0 < t2 < t1
