"""Reference error-rate models used for comparison against the timing model:
a Fitts-law pointing error model driven by movement time, and a 2D Gaussian
endpoint model for moving-target clicking evaluated by Monte Carlo.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .errors import DomainError


@dataclass(frozen=True)
class WobbrockParams:
    """Fitts-law intercept/slope (seconds, seconds per bit)."""

    a: float
    b: float

    def __post_init__(self):
        if self.b <= 0:
            raise DomainError(f"b must be > 0, got {self.b}")


@dataclass(frozen=True)
class HuangParams:
    """Coefficients of the endpoint mean/spread polynomials in V and W.

    mu_t = a_t + b_t*V + c_t*W            (along movement direction)
    sigma_t = sqrt(d_t + e_t*V^2 + f_t*W^2 + g_t*V/W)
    sigma_n = sqrt(d_n + e_n*V^2 + f_n*W^2)   (normal direction, mu_n = 0)
    """

    a_t: float = 0.0
    b_t: float = 0.0
    c_t: float = 0.0
    d_t: float = 0.0
    e_t: float = 0.0
    f_t: float = 0.0
    g_t: float = 0.0
    d_n: float = 0.0
    e_n: float = 0.0
    f_n: float = 0.0


def wobbrock_er(params: WobbrockParams, D: float, W: float, MT_e: float) -> float:
    """Error rate of time-constrained pointing at distance D, width W, with
    effective movement time MT_e.  Negative bracket values (MT_e below the
    intercept) saturate at ER = 1."""
    if D <= 0:
        raise DomainError(f"D must be > 0, got {D}")
    if W <= 0:
        raise DomainError(f"W must be > 0, got {W}")
    if not math.isfinite(MT_e):
        raise DomainError(f"MT_e must be finite, got {MT_e}")
    bracket = 2.066 * W * (2.0 ** ((MT_e - params.a) / params.b) - 1.0)
    if bracket < 0:
        return 1.0
    return 1.0 - float(erf(bracket / (D * math.sqrt(2.0))))


def huang_endpoint_dist(params: HuangParams, V: float, W: float) -> tuple[float, float, float, float]:
    """Endpoint Gaussian moments (mu_t, sigma_t, mu_n, sigma_n) at target
    speed V and width W, in the velocity-aligned frame."""
    if W <= 0:
        raise DomainError(f"W must be > 0, got {W}")
    mu_t = params.a_t + params.b_t * V + params.c_t * W
    var_t = params.d_t + params.e_t * V**2 + params.f_t * W**2 + params.g_t * V / W
    var_n = params.d_n + params.e_n * V**2 + params.f_n * W**2
    if var_t <= 0:
        raise DomainError(f"sigma_t radicand must be > 0, got {var_t}")
    if var_n <= 0:
        raise DomainError(f"sigma_n radicand must be > 0, got {var_n}")
    return mu_t, math.sqrt(var_t), 0.0, math.sqrt(var_n)


def huang_er_circular(
    params: HuangParams, V: float, W: float, n_samples: int = 10**6, seed: int = 0
) -> float:
    """Monte-Carlo error rate: fraction of sampled endpoints landing outside
    the circular target of diameter W."""
    if n_samples < 10**4:
        raise DomainError(f"n_samples must be >= 1e4, got {n_samples}")
    mu_t, sigma_t, mu_n, sigma_n = huang_endpoint_dist(params, V, W)
    rng = np.random.default_rng(seed)
    x = mu_t + sigma_t * rng.standard_normal(n_samples)
    y = mu_n + sigma_n * rng.standard_normal(n_samples)
    r = W / 2.0
    return float(np.mean(x * x + y * y > r * r))
