import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def literal_select_level(psi, spectrum, n, limit):
    """Independent oracle: linear scan of the selector condition."""
    floor = psi(1.0 / n) ** 2
    best = 0
    for j in range(1, limit + 1):
        s = spectrum.value(j)
        if s <= 0.0:
            break
        if psi(s) ** 2 > max(floor, j / n):
            best = j
    return best


def literal_select_modulus(theta, spectrum, delta, limit):
    best = 0
    for j in range(1, limit + 1):
        s = spectrum.value(j)
        if s <= 0.0:
            break
        if theta(s) > delta:
            best = j
    return best
