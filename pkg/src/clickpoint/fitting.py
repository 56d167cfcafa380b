"""Binned error-rate fitting: sequential binning of trials, SSE loss against
binned observed error rates, seeded multi-start simplex optimization, and
two-fold cross-validation.

Trials are sorted by the index W_t/D_t and cut into contiguous near-equal
bins; the taken temporal "distance" D_t is the inter-click period P (the only
remaining temporal scale of the model), configurable for sensitivity checks.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import minimize
from scipy.special import erf

from . import icp
from .baselines import WobbrockParams
from .errors import DomainError, FitError
from .icp import IcpParams
from .kinematics import TrialFeatures

ICP_BOUNDS = ((0.0, 1.0), (1e-4, 1.0), (1e-2, 1e2), (1e-3, 5.0))
WOBBROCK_BOUNDS = ((-1.0, 1.0), (1e-3, 2.0))
DEFAULT_BUDGET = 64

INDEX_KEYS: dict[str, Callable[[TrialFeatures], float]] = {
    "wt_over_p": lambda f: f.W_t / f.P,
    "wt_over_tc": lambda f: f.W_t / f.t_c,
    "wt": lambda f: f.W_t,
}

Trial = tuple[TrialFeatures, Union[bool, float]]


@dataclass(frozen=True)
class BinnedPoint:
    """One fitted data point: a contiguous slice of index-sorted trials."""

    bin_index: int
    n_trials: int
    observed_er: float
    mean_W_t: float
    mean_t_c: float
    mean_P: float
    mean_index_value: float


@dataclass(frozen=True)
class FitResult:
    params: Union[IcpParams, WobbrockParams]
    sse: float
    r2: float
    adjusted_r2: float
    n_bins: int
    k_free: int
    per_bin_residuals: tuple[float, ...]


@dataclass(frozen=True)
class ParticipantFit:
    participant_id: str
    result: Optional[FitResult]
    error: Optional[str]


def bin_trials(trials: Sequence[Trial], n_bins: int, index: str = "wt_over_p") -> list[BinnedPoint]:
    """Sort trials by the index key and split into contiguous equal-count bins.

    The remainder of an uneven split goes to the leftmost bins.  The success
    flag may be a float in [0, 1] (a per-trial success probability) so that
    noiseless synthetic data can be binned without sampling.
    """
    if n_bins < 2:
        raise FitError(f"n_bins must be >= 2, got {n_bins}")
    if not trials:
        raise FitError("no trials to bin")
    if len(trials) < n_bins:
        raise FitError(f"fewer trials ({len(trials)}) than bins ({n_bins})")
    try:
        key = INDEX_KEYS[index]
    except KeyError:
        raise FitError(f"unknown binning index {index!r}; options: {sorted(INDEX_KEYS)}") from None

    values = np.array([key(f) for f, _ in trials], dtype=float)
    order = np.argsort(values, kind="stable")
    w_t = np.array([f.W_t for f, _ in trials], dtype=float)[order]
    t_c = np.array([f.t_c for f, _ in trials], dtype=float)[order]
    p = np.array([f.P for f, _ in trials], dtype=float)[order]
    succ = np.array([float(s) for _, s in trials], dtype=float)[order]
    values = values[order]

    n = len(trials)
    base, rem = divmod(n, n_bins)
    bins = []
    start = 0
    for i in range(n_bins):
        size = base + (1 if i < rem else 0)
        sl = slice(start, start + size)
        bins.append(
            BinnedPoint(
                bin_index=i,
                n_trials=size,
                observed_er=float(1.0 - np.mean(succ[sl])),
                mean_W_t=float(np.mean(w_t[sl])),
                mean_t_c=float(np.mean(t_c[sl])),
                mean_P=float(np.mean(p[sl])),
                mean_index_value=float(np.mean(values[sl])),
            )
        )
        start += size
    return bins


def _bin_arrays(bins: Sequence[BinnedPoint]):
    return (
        np.array([b.mean_W_t for b in bins]),
        np.array([b.mean_t_c for b in bins]),
        np.array([b.mean_P for b in bins]),
        np.array([b.observed_er for b in bins]),
    )


def icp_loss(params: IcpParams, bins: Sequence[BinnedPoint]) -> float:
    """Sum of squared ER residuals over bins; infinite outside the domain."""
    w_t, t_c, p, obs = _bin_arrays(bins)
    if np.any(t_c <= 0) or np.any(p <= 0) or np.any(w_t < 0):
        return math.inf
    try:
        pred = icp._er_array(params, w_t, t_c, p)
    except DomainError:
        return math.inf
    if not np.all(np.isfinite(pred)):
        return math.inf
    return float(np.sum((pred - obs) ** 2))


def _worker_count(n_tasks: int) -> int:
    env = os.environ.get("CLICKPOINT_THREADS", "")
    try:
        cap = int(env) if env else (os.cpu_count() or 1)
    except ValueError:
        cap = 1
    return max(1, min(cap, n_tasks))


def _multistart(loss, starts, bounds):
    """Run one simplex minimization per start; return (x, loss, start_index)
    of the best converged run.  Reduction is by (loss, start index) so the
    result does not depend on scheduling."""
    options = {"maxiter": 5000, "maxfev": 10000, "fatol": 1e-8, "xatol": 1e-8}

    def run(x0):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                res = minimize(loss, np.asarray(x0, dtype=float), method="Nelder-Mead",
                               bounds=bounds, options=options)
            f = float(res.fun)
            if not math.isfinite(f):
                return None, math.inf, "non-finite loss"
            return res.x, f, None
        except Exception as exc:  # noqa: BLE001 - a failed start is data, not fatal
            return None, math.inf, f"{type(exc).__name__}: {exc}"

    workers = _worker_count(len(starts))
    if workers == 1:
        outcomes = [run(x0) for x0 in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, starts))

    best = None
    failures = []
    for i, (x, f, err) in enumerate(outcomes):
        if x is None:
            failures.append(f"start {i}: {err}")
            continue
        if best is None or f < best[1]:
            best = (x, f, i)
    if best is None:
        raise FitError("all optimizer starts failed: " + "; ".join(failures[:5]))
    return best


def _random_starts(rng, budget, bounds, log_dims):
    starts = np.empty((budget, len(bounds)))
    for d, (lo, hi) in enumerate(bounds):
        if d in log_dims:
            starts[:, d] = np.exp(rng.uniform(math.log(lo), math.log(hi), size=budget))
        else:
            starts[:, d] = rng.uniform(lo, hi, size=budget)
    return starts


def _goodness(obs: np.ndarray, pred: np.ndarray, k_free: int):
    residuals = pred - obs
    sse = float(np.sum(residuals**2))
    ss_tot = float(np.sum((obs - np.mean(obs)) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0 if sse == 0.0 else -math.inf
    else:
        r2 = 1.0 - sse / ss_tot
    n = len(obs)
    adjusted = 1.0 - (1.0 - r2) * (n - 1) / (n - k_free - 1)
    return sse, r2, adjusted, tuple(float(r) for r in residuals)


def fit_icp(
    bins: Sequence[BinnedPoint],
    init: Optional[IcpParams] = None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> FitResult:
    """Multi-start simplex fit of the four timing parameters to binned ER.

    The window-fraction parameter c_mu is reported as the representative
    <= 1/2 of the two mirror solutions (the loss is exactly symmetric under
    c_mu -> 1 - c_mu).
    """
    k_free = 4
    if len(bins) <= k_free + 1:
        raise FitError(
            f"need more than {k_free + 1} bins to fit {k_free} parameters "
            f"with adjusted R^2, got {len(bins)}"
        )
    w_t, t_c, p, obs = _bin_arrays(bins)
    if np.all(w_t == 0.0):
        raise FitError("every bin has W_t = 0; the predicted ER is 1 for any parameters")

    def loss(x):
        try:
            params = IcpParams(*x)
        except DomainError:
            return math.inf
        with np.errstate(over="ignore", invalid="ignore"):
            pred = icp._er_array(params, w_t, t_c, p)
        if not np.all(np.isfinite(pred)):
            return math.inf
        return float(np.sum((pred - obs) ** 2))

    init_x = (init.as_tuple() if init is not None else icp.DEFAULT_INIT)
    rng = np.random.default_rng(seed)
    starts = [np.asarray(init_x)] + list(_random_starts(rng, budget, ICP_BOUNDS, log_dims={1, 2, 3}))
    x, _, _ = _multistart(loss, starts, ICP_BOUNDS)
    c_mu = float(min(x[0], 1.0 - x[0]))
    params = IcpParams(c_mu, float(x[1]), float(x[2]), float(x[3]))
    pred = icp._er_array(params, w_t, t_c, p)
    sse, r2, adjusted, residuals = _goodness(obs, pred, k_free)
    return FitResult(params, sse, r2, adjusted, len(bins), k_free, residuals)


def _wobbrock_er_array(a: float, b: float, D, W, MT_e):
    with np.errstate(over="ignore", invalid="ignore"):
        bracket = 2.066 * W * (np.exp2((MT_e - a) / b) - 1.0)
        er = 1.0 - erf(bracket / (D * math.sqrt(2.0)))
    return np.where(bracket < 0, 1.0, er)


def fit_wobbrock(
    conditions: Sequence[tuple[float, float, float, float]],
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> FitResult:
    """Fit the Fitts-law error model's (a, b) to (D, W, MT_e, observed_er)."""
    k_free = 2
    if len(conditions) <= k_free + 1:
        raise FitError(
            f"need more than {k_free + 1} conditions, got {len(conditions)}"
        )
    D = np.array([c[0] for c in conditions], dtype=float)
    W = np.array([c[1] for c in conditions], dtype=float)
    MT_e = np.array([c[2] for c in conditions], dtype=float)
    obs = np.array([c[3] for c in conditions], dtype=float)
    if np.any(D <= 0) or np.any(W <= 0):
        raise FitError("conditions need D > 0 and W > 0")

    def loss(x):
        a, b = x
        if b <= 0:
            return math.inf
        pred = _wobbrock_er_array(a, b, D, W, MT_e)
        if not np.all(np.isfinite(pred)):
            return math.inf
        return float(np.sum((pred - obs) ** 2))

    rng = np.random.default_rng(seed)
    starts = [np.array([0.1, 0.15])] + list(_random_starts(rng, budget, WOBBROCK_BOUNDS, log_dims={1}))
    x, _, _ = _multistart(loss, starts, WOBBROCK_BOUNDS)
    params = WobbrockParams(a=float(x[0]), b=float(x[1]))
    pred = _wobbrock_er_array(params.a, params.b, D, W, MT_e)
    sse, r2, adjusted, residuals = _goodness(obs, pred, k_free)
    return FitResult(params, sse, r2, adjusted, len(conditions), k_free, residuals)


def crossval(
    trials: Sequence[Trial],
    model_spec: str = "icp",
    n_folds: int = 2,
    seed: int = 0,
    n_bins: int = 36,
    budget: int = DEFAULT_BUDGET,
    index: str = "wt_over_p",
) -> float:
    """Cross-validated mean absolute ER error, in percentage points.

    Trials are split into seeded random folds; for each fold the model is fit
    on that fold's bins and evaluated on the bins of the held-out remainder;
    directions are averaged.
    """
    if model_spec != "icp":
        raise FitError(f"unknown model_spec {model_spec!r}")
    if n_folds < 2:
        raise FitError(f"n_folds must be >= 2, got {n_folds}")
    if len(trials) < n_folds * n_bins:
        raise FitError(
            f"need at least {n_folds * n_bins} trials for {n_folds}-fold "
            f"cross-validation with {n_bins} bins, got {len(trials)}"
        )
    rng = np.random.default_rng(seed)
    perm = rng.permutation(len(trials))
    folds = np.array_split(perm, n_folds)
    maes = []
    for i, fold in enumerate(folds):
        held_out = np.concatenate([f for j, f in enumerate(folds) if j != i])
        train = [trials[j] for j in fold]
        test = [trials[j] for j in held_out]
        fit = fit_icp(bin_trials(train, n_bins, index), budget=budget, seed=seed)
        test_bins = bin_trials(test, n_bins, index)
        w_t, t_c, p, obs = _bin_arrays(test_bins)
        pred = icp._er_array(fit.params, w_t, t_c, p)
        maes.append(float(np.mean(np.abs(pred - obs))) * 100.0)
    return float(np.mean(maes))


def fit_per_participant(
    groups: dict[str, Sequence[Trial]],
    n_bins: int = 18,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    index: str = "wt_over_p",
) -> list[ParticipantFit]:
    """Independent fits per participant; per-participant failures are
    reported in the result list instead of aborting the batch."""
    out = []
    for pid, trials in groups.items():
        try:
            fit = fit_icp(bin_trials(list(trials), n_bins, index), budget=budget, seed=seed)
            out.append(ParticipantFit(pid, fit, None))
        except (FitError, DomainError) as exc:
            out.append(ParticipantFit(pid, None, str(exc)))
    return out


@dataclass(frozen=True)
class TrialFitResult:
    """Result of the per-trial likelihood mode (not the binned reference
    procedure; provided for sensitivity checks only)."""

    params: IcpParams
    nll: float
    n_trials: int


def bernoulli_nll(params: IcpParams, trials: Sequence[Trial]) -> float:
    """Negative log-likelihood of per-trial success flags under the model."""
    w_t = np.array([f.W_t for f, _ in trials], dtype=float)
    t_c = np.array([f.t_c for f, _ in trials], dtype=float)
    p = np.array([f.P for f, _ in trials], dtype=float)
    succ = np.array([float(s) for _, s in trials], dtype=float)
    er = np.clip(icp._er_array(params, w_t, t_c, p), 1e-12, 1.0 - 1e-12)
    return float(-np.sum(succ * np.log(1.0 - er) + (1.0 - succ) * np.log(er)))


def fit_icp_trials(
    trials: Sequence[Trial],
    init: Optional[IcpParams] = None,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> TrialFitResult:
    """Opt-in per-trial Bernoulli likelihood fit (alternative to bins)."""
    if len(trials) < 8:
        raise FitError(f"need at least 8 trials, got {len(trials)}")

    def loss(x):
        try:
            params = IcpParams(*x)
        except DomainError:
            return math.inf
        with np.errstate(over="ignore", invalid="ignore"):
            v = bernoulli_nll(params, trials)
        return v if math.isfinite(v) else math.inf

    init_x = (init.as_tuple() if init is not None else icp.DEFAULT_INIT)
    rng = np.random.default_rng(seed)
    starts = [np.asarray(init_x)] + list(_random_starts(rng, budget, ICP_BOUNDS, log_dims={1, 2, 3}))
    x, f, _ = _multistart(loss, starts, ICP_BOUNDS)
    c_mu = float(min(x[0], 1.0 - x[0]))
    params = IcpParams(c_mu, float(x[1]), float(x[2]), float(x[3]))
    return TrialFitResult(params, float(f), len(trials))
