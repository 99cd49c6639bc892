import math

import numpy as np
import pytest
from scipy.optimize import brentq

from spclab.indexfn import (
    IndexFunction,
    OutOfRangeError,
    SmoothnessSpec,
    asymptotic_inverse_power_log,
    compose_psi,
    composite,
    exp_decay,
    log_only,
    power,
    power_log,
)


# Per family: the function, the smallest grid point with a representable
# value, and the depth used for the vanishing-limit check.
_SAMPLES = {
    "power": (power(0.7), 1e-12, 1e-16),
    "power_log": (power_log(1.0, 1.0), 1e-12, 1e-16),
    "power_log_neg": (power_log(2.0, -0.5), 1e-12, 1e-16),
    "log_only": (log_only(1.3), 1e-12, 1e-290),
    "exp_decay": (exp_decay(1.0, 0.5), 1e-4, 5e-5),
    "composite": (
        composite(lambda t: np.sqrt(t) * np.log(1.0 / t) ** -1.0, 0.5),
        1e-12,
        1e-16,
    ),
}


def sample_functions():
    return {name: fn for name, (fn, _, _) in _SAMPLES.items()}


def grid_for(name):
    fn, lo, _ = _SAMPLES[name]
    hi = min(fn.domain_upper, 0.9) if math.isfinite(fn.domain_upper) else 0.9
    return np.geomspace(lo, hi, 60)


def test_eval_examples():
    assert power(0.5)(0.25) == pytest.approx(0.5)
    assert power_log(1.0, 1.0)(math.exp(-1)) == pytest.approx(math.exp(-1))
    assert log_only(1.0)(math.exp(-4)) == pytest.approx(0.25)


def test_eval_rejects_domain_violations():
    fn = power(0.5)
    with pytest.raises(ValueError):
        fn(0.0)
    with pytest.raises(ValueError):
        fn(-1.0)
    with pytest.raises(ValueError):
        fn(2.0)
    with pytest.raises(ValueError):
        log_only(1.0)(1.0)


def test_family_parameter_validation():
    with pytest.raises(ValueError):
        power(-1.0)
    with pytest.raises(ValueError):
        log_only(0.0)
    with pytest.raises(ValueError):
        IndexFunction("power_log", (1.0, -2.0), 1.0, 0.9)  # beyond exp(mu/q)
    with pytest.raises(ValueError):
        IndexFunction("nope", (1.0,))


@pytest.mark.parametrize("name", sorted(_SAMPLES))
def test_positive_monotone_vanishing(name):
    fn, lo, deep = _SAMPLES[name]
    t = grid_for(name)
    vals = np.array([fn(x) for x in t])
    assert np.all(vals > 0.0)
    assert np.all(np.diff(vals) >= -1e-15 * vals[1:])
    # vanishing limit at zero along a decreasing sample sequence
    heads = np.array([fn(x) for x in np.geomspace(lo * 20, deep, 7)])
    assert np.all(np.diff(heads) < 0.0)
    assert heads[-1] < 0.05 * heads[0]


def test_companion_examples():
    assert power(0.5).theta()(0.25) == pytest.approx(0.25)
    assert log_only(1.0).theta()(math.exp(-4)) == pytest.approx(math.exp(-2) / 4, rel=1e-12)
    assert power(1.0).theta()(1.0) == pytest.approx(1.0)


@pytest.mark.parametrize("name", sorted(_SAMPLES))
def test_companion_strictly_increasing(name):
    th = sample_functions()[name].theta()
    t = grid_for(name)
    vals = np.array([th(x) for x in t])
    # Theta(t2)/Theta(t1) >= sqrt(t2/t1) > 1 gives strictness with a margin.
    assert np.all(vals[1:] / vals[:-1] >= np.sqrt(t[1:] / t[:-1]) * (1 - 1e-12))


def test_invert_examples():
    theta = power(1.0).theta()  # t^{3/2}
    assert theta.invert(0.125) == pytest.approx(0.25, abs=1e-12)
    assert power(1.0).invert(1.0) == pytest.approx(1.0)


def test_invert_matches_independent_root_finder():
    fn = power_log(1.0, 1.0)
    for s in (1e-6, 1e-9, 3e-4):
        ours = fn.invert(s)
        ref = brentq(lambda t: fn(t) - s, 1e-300, fn.domain_upper, xtol=1e-300, rtol=1e-15)
        assert ours == pytest.approx(ref, rel=1e-10)
    # frozen value for the power-log inverse at 1e-6 (bisection + brentq agree)
    assert fn.invert(1e-6) == pytest.approx(1.1383358086e-05, rel=1e-9)


@pytest.mark.parametrize("name", sorted(_SAMPLES))
def test_invert_round_trip(name, rng):
    fn, lo, _ = _SAMPLES[name]
    th = fn.theta()
    hi = min(th.domain_upper, 0.9) if math.isfinite(th.domain_upper) else 0.9
    lo_val, hi_val = th(lo), th(hi)
    targets = np.exp(rng.uniform(np.log(lo_val), np.log(hi_val), size=100))
    for s in targets:
        t = th.invert(float(s), tol=1e-12)
        assert abs(th(t) - s) <= max(1e-12, 1e-9 * s)


def test_invert_out_of_range():
    fn = power(1.0)
    with pytest.raises(OutOfRangeError):
        fn.invert(2.0)  # above fn(domain_upper) = 1


def test_compose_power_closed_form():
    psi = compose_psi(power(0.5), power(0.75))
    assert psi.family == "power"
    assert psi.params[0] == pytest.approx(0.4, abs=1e-15)
    assert psi(1e-5) == pytest.approx(1e-2, rel=1e-12)
    same = compose_psi(power(0.5), power(0.5))
    assert same.params[0] == pytest.approx(0.5, abs=1e-15)
    # pointwise agreement with the exponent algebra on a grid
    for mu, a in ((0.3, 0.6), (1.2, 1.0), (0.5, 0.75)):
        psi = compose_psi(power(mu), power(a))
        t = np.geomspace(1e-10, psi.domain_upper, 20)
        expo = (mu + 0.5) / (2 * a + 1)
        np.testing.assert_allclose([psi(x) for x in t], t**expo, rtol=1e-12)


def test_compose_generic_path_matches_closed_form():
    # Wrap the power link as a composite to force the numeric-inverse path.
    chi_wrapped = composite(lambda t: np.asarray(t) ** 0.75, 1.0)
    psi_num = compose_psi(power(0.5), chi_wrapped)
    psi_ref = compose_psi(power(0.5), power(0.75))
    for t in np.geomspace(1e-9, 0.9, 12):
        assert psi_num(t) == pytest.approx(psi_ref(t), rel=1e-10)


def test_compose_severe_asymptotics():
    # alpha = beta = p = 1: psi(t) behaves like t^{1/2} log^{1/2}(1/t);
    # checked as the ratio settling to a constant as t -> 0.
    phi = log_only(1.0, coeff=2.0)  # source smoothness for gamma = 1
    chi = log_only(1.5, coeff=2.0**1.5)
    psi = compose_psi(phi, chi)
    ratios = []
    for t in (1e-8, 1e-12, 1e-16, 1e-20):
        ratios.append(psi(t) / (math.sqrt(t) * math.log(1.0 / t) ** 0.5))
    drift = abs(ratios[-1] / ratios[-2] - 1.0)
    assert drift < 0.05
    assert abs(ratios[-1] / ratios[0] - 1.0) < 0.5


def test_asymptotic_inverse_examples():
    assert asymptotic_inverse_power_log(1.0, 0.0, 0.3) == pytest.approx(0.3)
    assert asymptotic_inverse_power_log(1.0, 1.0, 1e-6) == pytest.approx(
        1e-6 * math.log(1e6), rel=1e-12
    )
    with pytest.raises(ValueError):
        asymptotic_inverse_power_log(1.0, 1.0, 1.0)


@pytest.mark.parametrize(
    "q,mu,s",
    [(1.0, 1.0, 1e-45), (2.0, 2.0, 1e-90), (1.0, 2.0, 1e-250)],
)
def test_asymptotic_inverse_convergence(q, mu, s):
    # The ratio tends to one as s -> 0; the depth needed grows quickly with
    # mu/q because convergence is only logarithmic.
    fn = power_log(q, mu)
    exact = fn.invert(s)
    approx = asymptotic_inverse_power_log(q, mu, s)
    assert 0.95 <= exact / approx <= 1.05


def test_asymptotic_inverse_ratio_at_moderate_depth():
    # At s = 1e-20 the band for (1, 1) is still the looser [0.9, 1.1].
    fn = power_log(1.0, 1.0)
    ratio = asymptotic_inverse_power_log(1.0, 1.0, 1e-20) / fn.invert(1e-20)
    assert 0.9 <= ratio <= 1.1


def test_smoothness_spec_validation():
    SmoothnessSpec(mu=0.5, beta=1.0, radius=2.0)
    for bad in ({"mu": 0.0}, {"beta": -1.0}, {"radius": 0.0}):
        kwargs = {"mu": 0.5, "beta": 1.0, "radius": 1.0}
        kwargs.update(bad)
        with pytest.raises(ValueError):
            SmoothnessSpec(**kwargs)
