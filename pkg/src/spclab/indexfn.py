"""Calculus of index functions.

An index function is a continuous, non-decreasing map rho on (0, T] with
rho(0+) = 0.  Index functions encode smoothness relative to an operator
(source conditions) and regularity of priors.  This module implements the
parametric families used throughout the package, the companion map
Theta(t) = sqrt(t) * rho(t), numeric inversion, the composition that turns
truth smoothness plus a prior link into smoothness for the induced direct
problem, and the closed-form asymptotic inverse of power-log functions.

All evaluations accept scalars or NumPy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "IndexFunction",
    "SmoothnessSpec",
    "power",
    "power_log",
    "log_only",
    "exp_decay",
    "composite",
    "compose_psi",
    "asymptotic_inverse_power_log",
    "OutOfRangeError",
]

_FAMILIES = ("power", "power_log", "log_only", "exp_decay", "composite")

# Smallest argument probed while bracketing an inverse, just above the
# normal/subnormal boundary.
_T_FLOOR = 1e-300


class OutOfRangeError(ValueError):
    """Target value is not attained by the function on its domain."""


def _as_array(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if arr.size and (np.any(arr <= 0.0) or not np.all(np.isfinite(arr))):
        raise ValueError("index functions are defined for finite t > 0")
    return arr


@dataclass(frozen=True)
class IndexFunction:
    """One member of the supported index-function families.

    family       one of "power", "power_log", "log_only", "exp_decay",
                 "composite"
    params       family parameters, see the constructors below
    coeff        positive multiplier
    domain_upper upper end of the validated domain (may be inf for families
                 that are monotone on all of (0, inf))
    fn           evaluation callable, composite family only
    label        human-readable description, composite family only
    """

    family: str
    params: tuple = ()
    coeff: float = 1.0
    domain_upper: float = 1.0
    fn: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)
    label: str = ""

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown index-function family {self.family!r}")
        if not (self.coeff > 0.0 and math.isfinite(self.coeff)):
            raise ValueError("coeff must be positive and finite")
        if not self.domain_upper > 0.0:
            raise ValueError("domain_upper must be positive")
        if self.family == "power":
            (q,) = self.params
            if not q > 0.0:
                raise ValueError("power exponent must be positive")
        elif self.family == "power_log":
            q, mu = self.params
            if not q > 0.0:
                raise ValueError("power_log exponent must be positive")
            if self.domain_upper >= 1.0:
                raise ValueError("power_log requires domain_upper < 1")
            if mu < 0.0 and self.domain_upper > math.exp(mu / q) * (1 + 1e-12):
                # t^q log^{-mu}(1/t) stops being monotone beyond exp(mu/q).
                raise ValueError("power_log with mu < 0 needs domain_upper <= exp(mu/q)")
        elif self.family == "log_only":
            (mu,) = self.params
            if not mu > 0.0:
                raise ValueError("log_only exponent must be positive")
            if self.domain_upper >= 1.0:
                raise ValueError("log_only requires domain_upper < 1")
        elif self.family == "exp_decay":
            c, r = self.params
            if not (c > 0.0 and r > 0.0):
                raise ValueError("exp_decay parameters must be positive")
        elif self.family == "composite":
            if self.fn is None:
                raise ValueError("composite index function needs a callable")

    # -- evaluation ---------------------------------------------------------

    def _raw(self, t: np.ndarray) -> np.ndarray:
        if self.family == "power":
            (q,) = self.params
            return t**q
        if self.family == "power_log":
            q, mu = self.params
            ell = np.log(1.0 / t)
            return t**q * ell ** (-mu)
        if self.family == "log_only":
            (mu,) = self.params
            return np.log(1.0 / t) ** (-mu)
        if self.family == "exp_decay":
            c, r = self.params
            return np.exp(-c * t ** (-r))
        return np.asarray(self.fn(t), dtype=float)

    def __call__(self, t):
        arr = _as_array(t)
        if np.any(arr > self.domain_upper * (1.0 + 1e-12)):
            raise ValueError(
                f"argument exceeds domain_upper={self.domain_upper!r} "
                f"for {self.family} index function"
            )
        if self.family in ("power_log", "log_only") and np.any(arr >= 1.0):
            raise ValueError("log(1/t) must be positive: need t < 1")
        out = self.coeff * self._raw(arr)
        if np.isscalar(t) or np.ndim(t) == 0:
            return float(out)
        return out

    # -- companions and inversion ------------------------------------------

    def theta(self) -> "IndexFunction":
        """Companion t -> sqrt(t) * rho(t); strictly increasing."""
        if self.family == "power":
            (q,) = self.params
            return IndexFunction("power", (q + 0.5,), self.coeff, self.domain_upper)
        if self.family == "power_log":
            q, mu = self.params
            return IndexFunction("power_log", (q + 0.5, mu), self.coeff, self.domain_upper)
        if self.family == "log_only":
            (mu,) = self.params
            return IndexFunction("power_log", (0.5, mu), self.coeff, self.domain_upper)
        base = self

        def _theta(t: np.ndarray) -> np.ndarray:
            return np.sqrt(t) * base.coeff * base._raw(t)

        return IndexFunction(
            "composite",
            (),
            1.0,
            self.domain_upper,
            fn=_theta,
            label=f"companion of {self.label or self.family}",
        )

    def invert(self, s: float, tol: float = 1e-12) -> float:
        """Inverse by bracketing bisection in log(t).

        Requires the function to be strictly increasing (true for every
        companion and for all families with positive exponents).  Raises
        OutOfRangeError when s is above the value at domain_upper or below
        anything attainable down to t ~ 1e-290.
        """
        out = self.invert_array(np.array([s]), tol=tol)
        return float(out[0])

    def invert_array(self, s, tol: float = 1e-12) -> np.ndarray:
        s_arr = np.asarray(s, dtype=float)
        if np.any(~np.isfinite(s_arr)) or np.any(s_arr <= 0.0):
            raise OutOfRangeError("can only invert at finite positive values")
        hi = self.domain_upper
        if math.isinf(hi):
            hi = 1.0
            while self._value_at(hi) < s_arr.max() and hi < 1e300:
                hi *= 4.0
        hi_val = self._value_at(hi)
        if np.any(s_arr > hi_val * (1.0 + 1e-9)):
            raise OutOfRangeError(
                f"value {s_arr.max()!r} exceeds maximum {hi_val!r} on the domain"
            )
        lo = np.full_like(s_arr, hi)
        step = 2.0
        # Geometric escalation: the bracket reaches 1e-290 in ~10 rounds.
        for _ in range(64):
            vals = self._value_at(lo)
            need = vals > s_arr
            if not np.any(need):
                break
            lo = np.where(need, np.maximum(lo / step, _T_FLOOR), lo)
            step = min(step * step, 1e32)
            if np.all(lo <= _T_FLOOR):
                vals = self._value_at(lo)
                if np.any(vals > s_arr):
                    raise OutOfRangeError("value below attainable range")
                break
        ulo = np.log(lo)
        uhi = np.full_like(s_arr, math.log(hi))
        for _ in range(120):
            umid = 0.5 * (ulo + uhi)
            fmid = self._value_at(np.exp(umid))
            above = fmid > s_arr
            uhi = np.where(above, umid, uhi)
            ulo = np.where(above, ulo, umid)
            if np.max(uhi - ulo) < 1e-15:
                break
        t = np.exp(0.5 * (ulo + uhi))
        return t

    def _value_at(self, t) -> np.ndarray:
        # Internal: no domain complaints while bracketing.
        arr = np.asarray(t, dtype=float)
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            return self.coeff * self._raw(arr)


@dataclass(frozen=True)
class SmoothnessSpec:
    """Truth smoothness: power exponent mu, Sobolev order beta, radius R."""

    mu: float
    beta: float
    radius: float = 1.0

    def __post_init__(self) -> None:
        if not (self.mu > 0.0 and self.beta > 0.0 and self.radius > 0.0):
            raise ValueError("mu, beta and radius must all be positive")


# -- constructors ------------------------------------------------------------


def power(q: float, coeff: float = 1.0, domain_upper: float = 1.0) -> IndexFunction:
    """rho(t) = coeff * t**q."""
    return IndexFunction("power", (float(q),), coeff, domain_upper)


def power_log(q: float, mu: float, coeff: float = 1.0, domain_upper: float | None = None) -> IndexFunction:
    """rho(t) = coeff * t**q * log(1/t)**(-mu) on (0, domain_upper]."""
    if domain_upper is None:
        domain_upper = math.exp(mu / q) * (1 - 1e-12) if mu < 0 else 1 - 1e-12
    return IndexFunction("power_log", (float(q), float(mu)), coeff, domain_upper)


def log_only(mu: float, coeff: float = 1.0, domain_upper: float = 1 - 1e-12) -> IndexFunction:
    """rho(t) = coeff * log(1/t)**(-mu); the severe-problem smoothness shape."""
    return IndexFunction("log_only", (float(mu),), coeff, domain_upper)


def exp_decay(c: float, r: float, coeff: float = 1.0, domain_upper: float = math.inf) -> IndexFunction:
    """rho(t) = coeff * exp(-c * t**(-r)); the mild-problem smoothness shape."""
    return IndexFunction("exp_decay", (float(c), float(r)), coeff, domain_upper)


def composite(fn: Callable, domain_upper: float, label: str = "") -> IndexFunction:
    """Wrap a vectorized callable that is already a valid index function."""
    return IndexFunction("composite", (), 1.0, domain_upper, fn=fn, label=label)


# -- composition and asymptotic inversion ------------------------------------


def compose_psi(phi: IndexFunction, chi: IndexFunction) -> IndexFunction:
    """Smoothness for the induced direct problem.

    Returns psi(t) = Theta_phi((Theta_chi^2)^{-1}(t)) where Theta_chi^2 is
    t * chi(t)^2.  For power families phi = t^mu, chi = t^a this collapses
    to the closed form t^{(mu + 1/2) / (2a + 1)}.
    """
    if phi.family == "power" and chi.family == "power":
        (mu,) = phi.params
        (a,) = chi.params
        expo = (mu + 0.5) / (2.0 * a + 1.0)
        # Theta_chi^2(t) = chi.coeff^2 t^{2a+1}; unwind its coefficient too.
        coeff = phi.coeff * chi.coeff ** (-2.0 * expo)
        upper = chi.coeff**2 * chi.domain_upper ** (2.0 * a + 1.0)
        return IndexFunction("power", (expo,), coeff, upper)

    theta_phi = phi.theta()

    def _tchisq(t: np.ndarray) -> np.ndarray:
        return t * chi._value_at(t) ** 2

    tchisq = IndexFunction(
        "composite",
        (),
        1.0,
        chi.domain_upper,
        fn=_tchisq,
        label="t * chi(t)^2",
    )
    upper = float(tchisq._value_at(np.asarray(chi.domain_upper)))

    def _psi(t: np.ndarray) -> np.ndarray:
        x = tchisq.invert_array(t)
        return theta_phi._value_at(x)

    return IndexFunction(
        "composite",
        (),
        1.0,
        upper,
        fn=_psi,
        label="direct-problem smoothness (composed)",
    )


def asymptotic_inverse_power_log(q: float, mu: float, s) -> float | np.ndarray:
    """Closed-form asymptotic inverse of t^q * log^{-mu}(1/t).

    Returns s^{1/q} * log^{mu/q}(1/s^{1/q}).  The ratio to the exact inverse
    tends to one as s -> 0; convergence is logarithmic, so at moderate s the
    ratio can still sit well away from one when mu/q is large.
    """
    if q <= 0.0 or mu < 0.0:
        raise ValueError("need q > 0 and mu >= 0")
    arr = np.asarray(s, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("need 0 < s < 1 so that the logarithm is positive")
    root = arr ** (1.0 / q)
    out = root * np.log(1.0 / root) ** (mu / q)
    if np.isscalar(s) or np.ndim(s) == 0:
        return float(out)
    return out
