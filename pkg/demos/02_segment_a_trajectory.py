"""
From raw trajectory to predictors
=================================

Walk one synthetic trial through the measurement pipeline: speed profile,
Gaussian smoothing, persistence-ranked extrema, submovement triplets, and
finally the (W_t, t_c, P) tuple the model consumes.
"""

# %%
# Simulate a short session so we have a realistic trajectory to dissect.
from clickpoint.icp import IcpParams
from clickpoint.simulate import ScenarioConfig, simulate_session

cfg = ScenarioConfig(
    n_trials=12,
    target_width_mm=(6.0, 6.0),
    target_speed_mm_s=(0.0, 0.0),
    submovement_count={3: 1.0},
    submovement_duration_s=(0.15, 0.15),
    sampling_rate_hz=125.0,
    true_params=IcpParams(0.129, 0.0873, 14.532, 0.461),
    seed=31,
    approach_distance_factors=(8.0, 12.0),
    center_fractions=(0.78, 0.88),
    aim_sigma_factor=0.1,
    deliberate_miss_p=0.0,
)
session, truths = simulate_session(cfg)
trial = session.trials[0]
print(f"trial {trial.trial_id}: {len(trial.samples)} samples, "
      f"click at t={trial.click_time:.3f}s, success={trial.success}")

# %%
# The speed profile is noisy sample-to-sample; smoothing with a small
# Gaussian kernel keeps the three bells while killing grid jitter.
import numpy as np

from clickpoint.kinematics import smooth, speed_profile

raw = speed_profile(trial)
prof = smooth(raw, kernel_sigma_samples=1.5)
peak = float(np.max(prof.speed))
for i in range(0, len(prof.t), 4):
    bar = "#" * int(round(40.0 * prof.speed[i] / peak))
    print(f"  t={prof.t[i]:.3f}s |{bar}")

# %%
# Persistence pairs each local minimum with the maximum it births; shallow
# wiggles die below the threshold and only real bells survive.
from clickpoint.kinematics import persistence_extrema, segment_submovements

pairs = persistence_extrema(prof, threshold=0.2)
print(f"{len(pairs)} persistent min/max pairs at indices: {pairs}")

segs = segment_submovements(prof, threshold=0.2, min_duration=0.05)
for s in segs:
    print(f"  submovement {s.t_start:.3f}s -> peak {s.t_peak:.3f}s -> {s.t_end:.3f}s")

# %%
# Feature extraction takes the last submovement before the click, crosses
# its relative-velocity line with the target disc, and emits the predictor
# tuple.  Compare against what the simulator says it generated.
from clickpoint.kinematics import trial_features

f = trial_features(trial, kernel_sigma_samples=1.5)
truth = truths[0]
print(f"measured  W_t={f.W_t * 1000:6.1f} ms  t_c={f.t_c * 1000:6.1f} ms  P={f.P:.3f} s")
print(f"generated W_t={truth.w_t * 1000:6.1f} ms  t_c={truth.t_c * 1000:6.1f} ms  P={truth.p:.3f} s")
