"""
Closed-form click error rates
=============================

The model in one sitting: a click is planned inside the time window the
pointer spends over the target, the planned moment is a fixed fraction of
that window, and the executed click scatters around the plan with a spread
set by two pooled timing channels.  Everything below is plain evaluation,
no data files needed.
"""

# %%
# The four parameters: window fraction c_mu, spread scale c_sigma, and the
# inter-click channel's decay nu and floor delta.
from clickpoint.icp import IcpParams, predict_er, timing_distribution

params = IcpParams(c_mu=0.129, c_sigma=0.0873, nu=14.532, delta=0.461)

# %%
# One trial's predictors: the crossing window W_t (seconds the pointer path
# spends over the target), the duration t_c from last-submovement start to
# click, and the mean inter-click period P.
w_t, t_c, p = 0.288, 0.296, 0.636
dist = timing_distribution(params, w_t, t_c, p)
print(f"planned click at  mu    = {dist.mu * 1000:.1f} ms into the window")
print(f"timing spread     sigma = {dist.sigma * 1000:.1f} ms")
print(f"error rate        ER    = {predict_er(params, w_t, t_c, p):.4f}")

# %%
# ER falls steeply as the crossing window widens; a vanishing window means
# the click can never land inside, so ER saturates at 1.
print("\n  W_t (ms)   ER")
for ms in (0, 50, 100, 150, 200, 300, 400, 600):
    er = predict_er(params, ms / 1000.0, t_c, p)
    print(f"  {ms:8d}   {er:.4f}")

# %%
# The spread pools two noise sources: one grows with the inter-click period
# (hurried clicking is sloppier per unit time), the other shrinks as the
# submovement-to-click duration grows.  The pooled sigma is always below
# either channel alone.
import math

sigma_t = params.c_sigma * p
sigma_v = params.c_sigma * (1.0 / math.expm1(params.nu * t_c) + params.delta)
print(f"\nperiod channel    sigma_t = {sigma_t * 1000:.1f} ms")
print(f"duration channel  sigma_v = {sigma_v * 1000:.1f} ms")
print(f"pooled            sigma   = {dist.sigma * 1000:.1f} ms")
