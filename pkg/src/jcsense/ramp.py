"""Adiabatic drive schedule eta(t) and its non-adiabaticity diagnostics.

The schedule eta_t = sqrt(1 - [(k t)^xi + 1]^{-1}) interpolates smoothly
between the undriven regime and the critical point eta -> 1.  The exponent
xi defaults to 4/3, the value for which the perturbative leakage into the
first excited doublet becomes flat in eta near criticality.

The transition-probability estimate is a first-order perturbative scaling
relation, not an equality: use it for trends and bounds only.  Its
denominator carries the squared doublet energy, as opposed to the more
common gap-squared adiabatic estimate; we keep that form deliberately and
treat the result as an order-of-magnitude diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, lgamma, log, sqrt

import numpy as np

DEFAULT_XI = 4.0 / 3.0


@dataclass(frozen=True)
class RampSchedule:
    """Drive trajectory eta(t) = sqrt(1 - [(k t)^xi + 1]^{-1}).

    k sets the ramp rate (same units as the coupling Omega), xi > 0 the
    approach exponent, and eta_target < 1 fixes the total duration through
    the closed-form inverse of the schedule.  k = 0 is allowed as a frozen
    schedule (eta identically 0); its duration is undefined.
    """

    k: float
    xi: float = DEFAULT_XI
    eta_target: float = 0.995

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"ramp rate k must be >= 0, got {self.k}")
        if self.xi <= 0:
            raise ValueError(f"exponent xi must be > 0, got {self.xi}")
        if not 0.0 < self.eta_target < 1.0:
            raise ValueError(f"eta_target must be in (0, 1), got {self.eta_target}")

    @property
    def kt_end(self) -> float:
        """Dimensionless duration: (1/(1 - eta_target^2) - 1)^{1/xi}."""
        eps = 1.0 - self.eta_target**2
        return float((1.0 / eps - 1.0) ** (1.0 / self.xi))

    @property
    def duration(self) -> float:
        """Time at which eta(t) = eta_target."""
        if self.k == 0:
            raise ValueError("a frozen schedule (k = 0) never reaches its target")
        return self.kt_end / self.k

    def time_to_reach(self, eta: float) -> float:
        """Closed-form inverse t(eta) of the schedule."""
        if not 0.0 <= eta < 1.0:
            raise ValueError(f"eta must be in [0, 1), got {eta}")
        if self.k == 0:
            raise ValueError("a frozen schedule (k = 0) stays at eta = 0")
        if eta == 0.0:
            return 0.0
        eps = 1.0 - eta * eta
        return float((1.0 / eps - 1.0) ** (1.0 / self.xi) / self.k)


def epsilon_at(s: RampSchedule, t: float) -> float:
    """Distance from criticality epsilon(t) = [(k t)^xi + 1]^{-1} = 1 - eta^2."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return float(1.0 / ((s.k * t) ** s.xi + 1.0))


def eta_at(s: RampSchedule, t: float) -> float:
    """Drive amplitude at time t; exactly 0 at t = 0."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0 or s.k == 0:
        return 0.0
    return float(np.sqrt(1.0 - epsilon_at(s, t)))


def eta_dot_at(s: RampSchedule, t: float) -> float:
    """Exact time derivative of eta(t).

    With w = (k t)^xi:  d eta/dt = xi w / (t * 2 eta (w+1)^2).  At t = 0 the
    schedule starts from rest in w, and 0.0 is returned by contract; note the
    one-sided limit of d eta/dt itself is divergent for xi < 2 (eta grows as
    (k t)^{xi/2} at early times).
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0 or s.k == 0:
        return 0.0
    w = (s.k * t) ** s.xi
    eta = np.sqrt(w / (w + 1.0))
    return float(s.xi * w / (t * 2.0 * eta * (w + 1.0) ** 2))


def eta_dot_asymptotic(s: RampSchedule, eta: float) -> float:
    """Near-critical form of the ramp velocity.

    d eta/dt ~ (eta xi k / 2) (1 - eta^2)^{(xi+1)/xi}, valid for k t >> 1;
    agrees with :func:`eta_dot_at` up to a factor (1 - eta^2)^{-3/4} -> 1.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must be in (0, 1), got {eta}")
    eps = 1.0 - eta * eta
    return float(0.5 * eta * s.xi * s.k * eps ** ((s.xi + 1.0) / s.xi))


def transition_probability(s: RampSchedule, omega: float, eta: float, n: int) -> float:
    """Perturbative leakage estimate into the n-th excited doublet.

    P_n ~ | eta_dot * eta * e^{-n eta^2/2} (sqrt(n) eta)^{n-2}
            / (2 sqrt2 n Omega (1-eta^2)^{7/4} sqrt((n-1)!)) |^2

    computed in modulus with a log-space factorial (finite for n up to a few
    hundred), using the near-critical ramp velocity of
    :func:`eta_dot_asymptotic`.  This is the form in which the xi = 4/3
    exponent choice cancels the (1-eta^2) power exactly, making P_1 flat
    along the ramp near criticality and bounding every channel by
    (k / (3 sqrt2 Omega))^2.  Order-of-magnitude diagnostic only.
    """
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must be in (0, 1), got {eta}")
    if n < 1:
        raise ValueError(f"doublet index n must be >= 1, got {n}")
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if s.k == 0:
        return 0.0
    eta_dot = eta_dot_asymptotic(s, eta)
    log_amp = (
        log(eta_dot)
        + log(eta)
        - n * eta * eta / 2.0
        + (n - 2) * (0.5 * log(n) + log(eta))
        - log(2.0 * sqrt(2.0) * n * omega)
        - 1.75 * log(1.0 - eta * eta)
        - 0.5 * lgamma(n)
    )
    return exp(2.0 * log_amp)


def transition_bound(s: RampSchedule, omega: float) -> float:
    """Uniform near-critical bound (k / (3 sqrt2 Omega))^2 on every channel."""
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    return (s.k / (3.0 * sqrt(2.0) * omega)) ** 2
