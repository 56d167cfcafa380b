"""Click-timing model: distribution of click times inside the temporal target
window and the closed-form error-rate prediction.

The click moment is modeled as normally distributed around a fixed fraction
c_mu of the temporal window W_t.  Its spread combines two timing cues by
maximum-likelihood integration: an interval estimate scaling with the click
period P and a visual estimate improving with cue viewing time t_c.  All
times are in seconds; the visual-cue bracket 1/(e^(nu*t_c) - 1) + delta is
treated as carrying seconds so both coefficients stay dimensionless.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import DomainError
from .kinematics import TrialFeatures

# fit starting point commonly used for mouse pointing
DEFAULT_INIT = (0.25, 0.08, 20.2, 0.366)


@dataclass(frozen=True)
class IcpParams:
    """Free parameters of the click-timing model."""

    c_mu: float
    c_sigma: float
    nu: float
    delta: float

    def __post_init__(self):
        vals = (self.c_mu, self.c_sigma, self.nu, self.delta)
        if not all(math.isfinite(v) for v in vals):
            raise DomainError(f"parameters must be finite, got {vals}")
        if not 0.0 <= self.c_mu <= 1.0:
            raise DomainError(f"c_mu must be in [0, 1], got {self.c_mu}")
        if self.c_sigma <= 0:
            raise DomainError(f"c_sigma must be > 0, got {self.c_sigma}")
        if self.nu <= 0:
            raise DomainError(f"nu must be > 0, got {self.nu}")
        if self.delta <= 0:
            raise DomainError(f"delta must be > 0, got {self.delta}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c_mu, self.c_sigma, self.nu, self.delta)


@dataclass(frozen=True)
class ClickTimingDist:
    """Gaussian click-time distribution and the two cues it integrates."""

    mu: float
    sigma: float
    sigma_t: float
    sigma_v: float


def _check_domain(W_t, t_c, P) -> None:
    if np.any(np.asarray(t_c) <= 0):
        raise DomainError(f"t_c must be > 0, got {t_c}")
    if np.any(np.asarray(P) <= 0):
        raise DomainError(f"P must be > 0, got {P}")
    if np.any(np.asarray(W_t) < 0):
        raise DomainError(f"W_t must be >= 0, got {W_t}")


def _sigma_arrays(params: IcpParams, t_c, P):
    """Vectorized (sigma_t, sigma_v, sigma) without domain checks."""
    t_c = np.asarray(t_c, dtype=float)
    P = np.asarray(P, dtype=float)
    sigma_t = params.c_sigma * P
    # expm1 may overflow to inf for huge nu*t_c; 1/inf = 0 is the wanted limit
    with np.errstate(over="ignore"):
        sigma_v = params.c_sigma * (1.0 / np.expm1(params.nu * t_c) + params.delta)
    sigma = np.sqrt((sigma_t**2 * sigma_v**2) / (sigma_t**2 + sigma_v**2))
    return sigma_t, sigma_v, sigma


def timing_distribution(params: IcpParams, W_t: float, t_c: float, P: float) -> ClickTimingDist:
    """Moments of the click-time distribution for one trial."""
    _check_domain(W_t, t_c, P)
    sigma_t, sigma_v, sigma = _sigma_arrays(params, t_c, P)
    return ClickTimingDist(
        mu=params.c_mu * float(W_t),
        sigma=float(sigma),
        sigma_t=float(sigma_t),
        sigma_v=float(sigma_v),
    )


def _er_array(params: IcpParams, W_t, t_c, P):
    """Vectorized error rate; inputs already validated."""
    W_t = np.asarray(W_t, dtype=float)
    _, _, sigma = _sigma_arrays(params, t_c, P)
    mu = params.c_mu * W_t
    root2 = math.sqrt(2.0)
    # W_t = 0 gives erf(0) + erf(0) = 0, hence ER = 1 with no special casing
    return 1.0 - 0.5 * (erf((W_t - mu) / (sigma * root2)) + erf(mu / (sigma * root2)))


def predict_er(params: IcpParams, W_t: float, t_c: float, P: float) -> float:
    """Probability that the click lands outside the temporal window [0, W_t]."""
    _check_domain(W_t, t_c, P)
    return float(_er_array(params, W_t, t_c, P))


def predict_trial(params: IcpParams, features: TrialFeatures) -> float:
    """Error rate for one trial's extracted features."""
    return predict_er(params, features.W_t, features.t_c, features.P)
