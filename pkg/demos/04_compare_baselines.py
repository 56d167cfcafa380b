"""
Three error-rate models side by side
====================================

The crossing-window model prices time pressure through (W_t, t_c, P); the
two baselines price it through task geometry.  This demo evaluates all
three on the same nominal conditions to show where their predictions pull
apart.  No fitting here, just forward evaluation with published-scale
coefficients.
"""

# %%
# A time-limited pointing condition: distance D, width W, and the movement
# time MT_e the time limit effectively allows.
from clickpoint.baselines import HuangParams, WobbrockParams, huang_er_circular, wobbrock_er

wob = WobbrockParams(a=0.130, b=0.157)
print("Fitts-style baseline (distance, width, allowed time):")
print("\n  MT_e (ms)   D=240 W=4.8   D=144 W=8.4")
for ms in (300, 400, 500, 600, 700, 800):
    e1 = wobbrock_er(wob, D=240.0, W=4.8, MT_e=ms / 1000.0)
    e2 = wobbrock_er(wob, D=144.0, W=8.4, MT_e=ms / 1000.0)
    print(f"  {ms:9d}   {e1:11.3f}   {e2:11.3f}")
print("\nAt or below the intercept a the bracket is negative and ER pins to 1:",
      wobbrock_er(wob, D=240.0, W=4.8, MT_e=0.130))

# %%
# The endpoint-spread baseline prices target speed V: endpoints scatter as
# a velocity-aligned Gaussian whose moments grow with V and W.
hp = HuangParams(a_t=0.2, b_t=0.004, c_t=-0.05, d_t=4.0, e_t=2e-5, f_t=0.01,
                 g_t=0.1, d_n=3.0, e_n=1.5e-5, f_n=0.008)
print("\nEndpoint-spread baseline (speed, width), Monte Carlo:")
print("\n  V (mm/s)   W=9.6   W=16.8   W=24.0")
for v in (0, 170, 340, 510):
    row = [huang_er_circular(hp, float(v), w, n_samples=200_000, seed=v)
           for w in (9.6, 16.8, 24.0)]
    print(f"  {v:8d}   {row[0]:5.3f}   {row[1]:6.3f}   {row[2]:6.3f}")

# %%
# The crossing-window model ignores geometry entirely once (W_t, t_c, P)
# are known: a slow hover over a tiny target and a fast pass over a huge
# one predict the same ER if their windows match.
from clickpoint.icp import IcpParams, predict_er

icp = IcpParams(c_mu=0.129, c_sigma=0.0873, nu=14.532, delta=0.461)
print("\nCrossing-window model (same W_t from different geometry):")
print(f"  W_t=150ms, t_c=296ms, P=636ms -> ER={predict_er(icp, 0.150, 0.296, 0.636):.3f}")
print(f"  W_t=150ms, t_c=150ms, P=636ms -> ER={predict_er(icp, 0.150, 0.150, 0.636):.3f}")
print(f"  W_t=150ms, t_c=296ms, P=300ms -> ER={predict_er(icp, 0.150, 0.296, 0.300):.3f}")
