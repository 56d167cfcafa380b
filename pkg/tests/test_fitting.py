import math

import numpy as np
import pytest

from clickpoint import FitError, IcpParams, predict_er
from clickpoint.baselines import WobbrockParams, wobbrock_er
from clickpoint.fitting import (
    BinnedPoint,
    bin_trials,
    bernoulli_nll,
    crossval,
    fit_icp,
    fit_icp_trials,
    fit_per_participant,
    fit_wobbrock,
    icp_loss,
)
from clickpoint.kinematics import TrialFeatures
from conftest import STUDY1


def features(w_t, t_c, p):
    return TrialFeatures((0, 0), (0, 0), (0, 0), 0.0, w_t, t_c, p)


def feature_grid(n, rng):
    """Well-spread synthetic predictor tuples."""
    w = rng.uniform(0.02, 0.6, n)
    t = rng.uniform(0.05, 0.6, n)
    p = rng.uniform(0.2, 1.5, n)
    return [features(float(a), float(b), float(c)) for a, b, c in zip(w, t, p)]


def exact_bins(params, feats, n_bins):
    """Bins whose observed_er is exactly the model value at each trial."""
    trials = [(f, 1.0 - predict_er(params, f.W_t, f.t_c, f.P)) for f in feats]
    return bin_trials(trials, n_bins)


# --- bin_trials -------------------------------------------------------------


def test_four_trials_two_bins_split_by_index():
    trials = [
        (features(0.1, 0.2, 0.5), 1.0),
        (features(0.2, 0.2, 0.5), 1.0),
        (features(0.3, 0.2, 0.5), 0.0),
        (features(0.4, 0.2, 0.5), 0.0),
    ]
    bins = bin_trials(trials, 2)
    assert [b.observed_er for b in bins] == [0.0, 1.0]
    assert [b.n_trials for b in bins] == [2, 2]
    assert bins[0].mean_W_t == pytest.approx(0.15)


def test_identical_index_keeps_input_order():
    trials = [(features(0.2, 0.2, 0.5), s) for s in (1.0, 1.0, 0.0, 0.0)]
    bins = bin_trials(trials, 2)
    assert [b.observed_er for b in bins] == [0.0, 1.0]


def test_remainder_goes_to_leftmost_bins():
    trials = [(features(0.1 * (i + 1), 0.2, 0.5), 1.0) for i in range(10)]
    bins = bin_trials(trials, 3)
    assert [b.n_trials for b in bins] == [4, 3, 3]


def test_fractional_success_values_average():
    trials = [
        (features(0.1, 0.2, 0.5), 1.0),
        (features(0.2, 0.2, 0.5), 0.5),
        (features(0.3, 0.2, 0.5), 0.0),
        (features(0.4, 0.2, 0.5), 0.0),
    ]
    bins = bin_trials(trials, 2)
    assert bins[0].observed_er == pytest.approx(0.25)
    assert bins[1].observed_er == pytest.approx(1.0)


def test_alternate_sort_indices():
    trials = [(features(0.1, 0.8, 0.5), 1.0), (features(0.2, 0.1, 4.0), 0.0)]
    by_wt_tc = bin_trials(trials, 2, index="wt_over_tc")
    assert by_wt_tc[0].mean_W_t == pytest.approx(0.1)
    by_wt = bin_trials(trials, 2, index="wt")
    assert by_wt[0].mean_W_t == pytest.approx(0.1)
    with pytest.raises(FitError):
        bin_trials(trials, 2, index="nope")


def test_more_bins_than_trials_rejected():
    trials = [(features(0.1, 0.2, 0.5), 1.0)] * 3
    with pytest.raises(FitError):
        bin_trials(trials, 4)


def test_bins_partition_the_trials():
    rng = np.random.default_rng(0)
    trials = [(f, 1.0) for f in feature_grid(100, rng)]
    bins = bin_trials(trials, 7)
    assert sum(b.n_trials for b in bins) == 100
    idx = [b.mean_index_value for b in bins]
    assert all(a <= b + 1e-12 for a, b in zip(idx, idx[1:]))


# --- icp_loss ---------------------------------------------------------------


def test_loss_zero_at_generating_params():
    # one trial per bin keeps the bin means equal to the trial features,
    # so observed_er matches predict_er exactly
    rng = np.random.default_rng(1)
    bins = exact_bins(STUDY1, feature_grid(40, rng), 40)
    assert icp_loss(STUDY1, bins) < 1e-12


def test_loss_grows_when_c_mu_perturbed():
    rng = np.random.default_rng(2)
    bins = exact_bins(STUDY1, feature_grid(40, rng), 40)
    base = icp_loss(STUDY1, bins)
    for eps in (-0.05, 0.05):
        worse = icp_loss(IcpParams(STUDY1.c_mu + eps, STUDY1.c_sigma, STUDY1.nu, STUDY1.delta), bins)
        assert worse > base


def test_single_bin_arithmetic():
    bin_ = BinnedPoint(0, 100, observed_er=0.5, mean_W_t=0.3, mean_t_c=0.3, mean_P=0.6,
                       mean_index_value=0.5)
    pred = predict_er(STUDY1, 0.3, 0.3, 0.6)
    assert icp_loss(STUDY1, [bin_]) == pytest.approx((pred - 0.5) ** 2, rel=1e-12)
    shifted = BinnedPoint(0, 100, observed_er=pred + 0.2, mean_W_t=0.3, mean_t_c=0.3,
                          mean_P=0.6, mean_index_value=0.5)
    assert icp_loss(STUDY1, [shifted]) == pytest.approx(0.04, rel=1e-9)


def test_invalid_bin_features_give_infinite_loss():
    bad = BinnedPoint(0, 10, observed_er=0.5, mean_W_t=0.3, mean_t_c=0.0, mean_P=0.6,
                      mean_index_value=0.5)
    assert icp_loss(STUDY1, [bad]) == math.inf


# --- fit_icp ----------------------------------------------------------------


def test_fit_recovers_params_from_exact_bins():
    rng = np.random.default_rng(3)
    bins = exact_bins(STUDY1, feature_grid(36 * 500, rng), 36)
    fit = fit_icp(bins, seed=7)
    assert abs(fit.params.c_mu - STUDY1.c_mu) <= 0.02
    assert abs(fit.params.c_sigma / STUDY1.c_sigma - 1.0) <= 0.10
    assert fit.r2 > 0.999


def test_fit_from_true_init_never_worse_than_init():
    rng = np.random.default_rng(4)
    bins = exact_bins(STUDY1, feature_grid(200, rng), 8)
    fit = fit_icp(bins, init=STUDY1, budget=8, seed=0)
    assert fit.sse <= icp_loss(STUDY1, bins) + 1e-15


def test_too_few_bins_rejected():
    rng = np.random.default_rng(5)
    bins = exact_bins(STUDY1, feature_grid(40, rng), 5)
    with pytest.raises(FitError):
        fit_icp(bins)


def test_c_mu_reported_on_canonical_branch():
    rng = np.random.default_rng(6)
    mirrored = IcpParams(1.0 - STUDY1.c_mu, STUDY1.c_sigma, STUDY1.nu, STUDY1.delta)
    bins = exact_bins(mirrored, feature_grid(800, rng), 12)
    fit = fit_icp(bins, seed=1)
    assert fit.params.c_mu <= 0.5
    # the mirror parameterization reproduces the same curve
    assert abs(fit.params.c_mu - STUDY1.c_mu) < 0.03


def test_fit_is_deterministic_for_fixed_seed():
    rng = np.random.default_rng(7)
    bins = exact_bins(STUDY1, feature_grid(300, rng), 10)
    a = fit_icp(bins, budget=12, seed=5)
    b = fit_icp(bins, budget=12, seed=5)
    assert a.params == b.params
    assert a.sse == b.sse


def test_adjusted_r2_matches_formula():
    rng = np.random.default_rng(8)
    bins = exact_bins(STUDY1, feature_grid(300, rng), 10)
    fit = fit_icp(bins, budget=8, seed=0)
    n, k = fit.n_bins, fit.k_free
    expected = 1.0 - (1.0 - fit.r2) * (n - 1) / (n - k - 1)
    assert fit.adjusted_r2 == pytest.approx(expected, rel=1e-12)
    assert len(fit.per_bin_residuals) == n


# --- fit_wobbrock -----------------------------------------------------------


def wobbrock_conditions(a, b, n=36):
    rng = np.random.default_rng(9)
    out = []
    for _ in range(n):
        D = float(rng.uniform(100, 400))
        W = float(rng.uniform(3, 12))
        MT_e = float(rng.uniform(0.25, 1.2))
        out.append((D, W, MT_e, wobbrock_er(WobbrockParams(a, b), D, W, MT_e)))
    return out


def test_wobbrock_recovery_within_five_percent():
    fit = fit_wobbrock(wobbrock_conditions(0.130, 0.157), seed=2)
    assert abs(fit.params.a / 0.130 - 1.0) <= 0.05
    assert abs(fit.params.b / 0.157 - 1.0) <= 0.05


def test_constant_observations_give_nonpositive_r2():
    conds = [(240.0, 4.8, 0.5 + 0.01 * i, 0.4) for i in range(10)]
    fit = fit_wobbrock(conds, seed=0)
    assert fit.r2 <= 0.0 or fit.r2 == 1.0  # SS_tot = 0 handled explicitly
    assert math.isfinite(fit.sse)


def test_empty_conditions_rejected():
    with pytest.raises(FitError):
        fit_wobbrock([])


# --- crossval ---------------------------------------------------------------


def test_noiseless_crossval_under_half_point():
    rng = np.random.default_rng(10)
    feats = feature_grid(1600, rng)
    trials = [(f, 1.0 - predict_er(STUDY1, f.W_t, f.t_c, f.P)) for f in feats]
    mae = crossval(trials, "icp", n_folds=2, seed=3, n_bins=16, budget=24)
    assert mae < 0.5


def test_identical_trials_make_folds_identical():
    trials = [(features(0.25, 0.3, 0.6), 0.8)] * 64
    mae = crossval(trials, "icp", n_folds=2, seed=0, n_bins=8, budget=8)
    fit = fit_icp(bin_trials(trials, 8), budget=8, seed=0)
    in_sample = 100.0 * float(np.mean(np.abs(np.array(fit.per_bin_residuals))))
    assert mae == pytest.approx(in_sample, abs=1e-6)


def test_unknown_model_spec_rejected():
    trials = [(features(0.25, 0.3, 0.6), 1.0)] * 64
    with pytest.raises(FitError):
        crossval(trials, "nope", n_bins=8)


# --- fit_per_participant ----------------------------------------------------


def participant_trials(c_sigma, seed, n=900):
    rng = np.random.default_rng(seed)
    params = IcpParams(0.15, c_sigma, 14.0, 0.45)
    feats = feature_grid(n, rng)
    return [(f, 1.0 - predict_er(params, f.W_t, f.t_c, f.P)) for f in feats]


def test_two_participants_keep_their_ordering():
    groups = {
        "gamer": participant_trials(0.058, 11),
        "nongamer": participant_trials(0.110, 12),
    }
    fits = fit_per_participant(groups, n_bins=18, budget=24, seed=4)
    by_id = {f.participant_id: f for f in fits}
    assert by_id["gamer"].error is None and by_id["nongamer"].error is None
    assert by_id["gamer"].result.params.c_sigma < by_id["nongamer"].result.params.c_sigma


def test_single_participant_list():
    fits = fit_per_participant({"p0": participant_trials(0.08, 13)}, n_bins=12, budget=12)
    assert len(fits) == 1
    assert fits[0].participant_id == "p0"


def test_degenerate_participant_flagged_not_fatal():
    zero = [(features(0.0, 0.3, 0.6), 0.0)] * 40
    groups = {"ok": participant_trials(0.08, 14), "stuck": zero}
    fits = fit_per_participant(groups, n_bins=12, budget=12)
    by_id = {f.participant_id: f for f in fits}
    assert by_id["ok"].error is None
    assert by_id["stuck"].error is not None
    assert by_id["stuck"].result is None


# --- per-trial likelihood route ---------------------------------------------


def test_bernoulli_nll_prefers_generating_params():
    rng = np.random.default_rng(15)
    feats = feature_grid(4000, rng)
    trials = []
    for f in feats:
        er = predict_er(STUDY1, f.W_t, f.t_c, f.P)
        trials.append((f, 0.0 if rng.random() < er else 1.0))
    good = bernoulli_nll(STUDY1, trials)
    off = bernoulli_nll(IcpParams(0.4, 0.02, 80.0, 2.0), trials)
    assert good < off


def test_fit_icp_trials_runs_and_reports():
    rng = np.random.default_rng(16)
    feats = feature_grid(600, rng)
    trials = []
    for f in feats:
        er = predict_er(STUDY1, f.W_t, f.t_c, f.P)
        trials.append((f, 0.0 if rng.random() < er else 1.0))
    res = fit_icp_trials(trials, budget=8, seed=0)
    assert math.isfinite(res.nll)
    assert 0.0 <= res.params.c_mu <= 0.5
