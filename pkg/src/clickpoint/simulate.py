"""Synthetic-user session generator with exact per-trial ground truth.

Each trial is a chain of minimum-jerk submovements (straight in space, speed
zero at the joints) ending in a final approach toward the target; the final
leg is minimum-jerk in the frame moving with the target, like a pursuit
movement with a straight closing chord on top.  The click
moment is sampled from the timing model: relative to the instant the
constant-average-velocity abstraction of the last submovement enters the
target disc (frozen, in the relative-velocity frame, at its position when
that submovement starts), the click offset is N(c_mu*W_t, sigma^2) and the
trial succeeds iff the offset lies in [0, W_t].  W_t, t_c and P are computed analytically
from the planned geometry, so fitted parameters can be checked against the
generating ones without trusting the measurement pipeline.

Targets move at constant velocity on an unbounded plane (no wall bounces;
a bounce would break the constant-velocity assumption behind the analytic
W_t).  The timing model, not click geometry, decides success; the logged
click position is wherever the pointer was at the sampled click time.
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Optional, Union

import numpy as np

from .errors import ConfigError, ParseError
from .icp import IcpParams, predict_er
from .trajlog import SessionLog, TrajectorySample, TrialLog, validate_session

SCENARIO_VERSION = 1

# default geometry of the final approach: start distance from the target
# center in target radii, and the fraction of the approach segment at which
# the aim point sits (>0.5 puts the crossing in the deceleration phase)
APPROACH_DISTANCE_FACTORS = (2.5, 6.0)
CENTER_FRACTIONS = (0.62, 0.9)
AIM_SIGMA_FACTOR = 0.55
DELIBERATE_MISS_P = 0.08
WANDER_DISTANCE = (25.0, 110.0)
WORKSPACE = (520.0, 320.0)
WORKSPACE_MARGIN = 30.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Generation recipe for one synthetic session."""

    n_trials: int
    target_width_mm: tuple[float, float]
    target_speed_mm_s: tuple[float, float]
    submovement_count: dict[int, float]
    submovement_duration_s: tuple[float, float]
    sampling_rate_hz: float
    true_params: IcpParams
    seed: int
    session_id: str = "sim"
    approach_distance_factors: tuple[float, float] = APPROACH_DISTANCE_FACTORS
    center_fractions: tuple[float, float] = CENTER_FRACTIONS
    aim_sigma_factor: float = AIM_SIGMA_FACTOR
    deliberate_miss_p: float = DELIBERATE_MISS_P


def _check_range(name, rng, low_ok=0.0, strict=False):
    lo, hi = rng
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ConfigError(f"{name}: bad range {rng}")
    if (lo <= low_ok) if strict else (lo < low_ok):
        raise ConfigError(f"{name}: range must start {'above' if strict else 'at or above'} {low_ok}")


def validate_scenario(cfg: ScenarioConfig) -> None:
    if cfg.n_trials < 1:
        raise ConfigError(f"n_trials must be >= 1, got {cfg.n_trials}")
    _check_range("target_width_mm", cfg.target_width_mm, 0.0, strict=True)
    _check_range("target_speed_mm_s", cfg.target_speed_mm_s, 0.0)
    _check_range("submovement_duration_s", cfg.submovement_duration_s, 0.0, strict=True)
    if cfg.sampling_rate_hz <= 0:
        raise ConfigError(f"sampling_rate_hz must be > 0, got {cfg.sampling_rate_hz}")
    if cfg.submovement_duration_s[0] * cfg.sampling_rate_hz < 2:
        raise ConfigError("submovements must span at least 2 samples at the given rate")
    if not cfg.submovement_count:
        raise ConfigError("submovement_count distribution is empty")
    total = 0.0
    for count, prob in cfg.submovement_count.items():
        if count < 1 or prob <= 0:
            raise ConfigError(f"submovement_count: bad entry {count}:{prob}")
        total += prob
    if abs(total - 1.0) > 1e-9:
        raise ConfigError(f"submovement_count probabilities sum to {total}, expected 1")
    _check_range("approach_distance_factors", cfg.approach_distance_factors, 1.0, strict=True)
    _check_range("center_fractions", cfg.center_fractions, 0.0, strict=True)
    if cfg.center_fractions[1] >= 1.0:
        raise ConfigError("center_fractions must stay below 1")
    if cfg.aim_sigma_factor < 0:
        raise ConfigError("aim_sigma_factor must be >= 0")
    if not 0.0 <= cfg.deliberate_miss_p < 1.0:
        raise ConfigError("deliberate_miss_p must be in [0, 1)")


# --- scenario file: versioned key=value text -------------------------------

_RANGE_KEYS = {
    "target_width_mm": "target_width_mm",
    "target_speed_mm_s": "target_speed_mm_s",
    "submovement_duration_s": "submovement_duration_s",
    "approach_distance_factors": "approach_distance_factors",
    "center_fractions": "center_fractions",
}
_FLOAT_KEYS = {"sampling_rate_hz", "c_mu", "c_sigma", "nu", "delta",
               "aim_sigma_factor", "deliberate_miss_p"}
_INT_KEYS = {"version", "n_trials", "seed"}


def parse_scenario(source: Union[str, os.PathLike, IO[str], Iterable[str]]) -> ScenarioConfig:
    """Parse a scenario file (key = value lines, '#' comments)."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            return parse_scenario(fh)
    raw: dict[str, str] = {}
    for line_no, line in enumerate(source, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {body!r}")
        key, _, value = body.partition("=")
        key, value = key.strip(), value.strip()
        if key in raw:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        raw[key] = value

    def take_float(key, default=None):
        if key not in raw:
            if default is None:
                raise ConfigError(f"missing required key {key!r}")
            return default
        text = raw.pop(key)
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{key}: not a number: {text!r}") from None

    def take_int(key, default=None):
        v = take_float(key, default)
        if v != int(v):
            raise ConfigError(f"{key}: expected integer, got {v}")
        return int(v)

    def take_range(key, default=None):
        if key not in raw:
            if default is None:
                raise ConfigError(f"missing required key {key!r}")
            return default
        text = raw.pop(key)
        parts = text.split(",")
        if len(parts) != 2:
            raise ConfigError(f"{key}: expected 'lo,hi', got {text!r}")
        try:
            return (float(parts[0]), float(parts[1]))
        except ValueError:
            raise ConfigError(f"{key}: expected numbers, got {text!r}") from None

    version = take_int("version")
    if version != SCENARIO_VERSION:
        raise ConfigError(f"unsupported scenario version {version}")
    counts_text = raw.pop("submovement_count", None)
    if counts_text is None:
        raise ConfigError("missing required key 'submovement_count'")
    counts: dict[int, float] = {}
    for item in counts_text.split(","):
        if ":" not in item:
            raise ConfigError(f"submovement_count: expected 'count:prob', got {item!r}")
        c, _, p = item.partition(":")
        try:
            counts[int(c)] = float(p)
        except ValueError:
            raise ConfigError(f"submovement_count: bad entry {item!r}") from None

    cfg = ScenarioConfig(
        n_trials=take_int("n_trials"),
        target_width_mm=take_range("target_width_mm"),
        target_speed_mm_s=take_range("target_speed_mm_s"),
        submovement_count=counts,
        submovement_duration_s=take_range("submovement_duration_s"),
        sampling_rate_hz=take_float("sampling_rate_hz"),
        true_params=IcpParams(
            c_mu=take_float("c_mu"),
            c_sigma=take_float("c_sigma"),
            nu=take_float("nu"),
            delta=take_float("delta"),
        ),
        seed=take_int("seed"),
        session_id=raw.pop("session_id", "sim"),
        approach_distance_factors=take_range("approach_distance_factors", APPROACH_DISTANCE_FACTORS),
        center_fractions=take_range("center_fractions", CENTER_FRACTIONS),
        aim_sigma_factor=take_float("aim_sigma_factor", AIM_SIGMA_FACTOR),
        deliberate_miss_p=take_float("deliberate_miss_p", DELIBERATE_MISS_P),
    )
    if raw:
        raise ConfigError(f"unknown keys: {sorted(raw)}")
    validate_scenario(cfg)
    return cfg


def write_scenario(cfg: ScenarioConfig, dest: Optional[IO[str]] = None) -> str:
    validate_scenario(cfg)
    counts = ",".join(f"{c}:{repr(p)}" for c, p in sorted(cfg.submovement_count.items()))
    lines = [
        f"version = {SCENARIO_VERSION}",
        f"session_id = {cfg.session_id}",
        f"n_trials = {cfg.n_trials}",
        f"target_width_mm = {cfg.target_width_mm[0]!r},{cfg.target_width_mm[1]!r}",
        f"target_speed_mm_s = {cfg.target_speed_mm_s[0]!r},{cfg.target_speed_mm_s[1]!r}",
        f"submovement_count = {counts}",
        f"submovement_duration_s = {cfg.submovement_duration_s[0]!r},{cfg.submovement_duration_s[1]!r}",
        f"sampling_rate_hz = {cfg.sampling_rate_hz!r}",
        f"c_mu = {cfg.true_params.c_mu!r}",
        f"c_sigma = {cfg.true_params.c_sigma!r}",
        f"nu = {cfg.true_params.nu!r}",
        f"delta = {cfg.true_params.delta!r}",
        f"seed = {cfg.seed}",
        f"approach_distance_factors = {cfg.approach_distance_factors[0]!r},{cfg.approach_distance_factors[1]!r}",
        f"center_fractions = {cfg.center_fractions[0]!r},{cfg.center_fractions[1]!r}",
        f"aim_sigma_factor = {cfg.aim_sigma_factor!r}",
        f"deliberate_miss_p = {cfg.deliberate_miss_p!r}",
    ]
    text = "\n".join(lines) + "\n"
    if dest is not None:
        dest.write(text)
    return text


# --- ground truth sidecar ---------------------------------------------------

GROUND_TRUTH_HEADER = "trial_id,w_t,t_c,p,t_sub,er_true,success"


@dataclass(frozen=True)
class GroundTruthTrial:
    """Model-level truth for one trial: the predictor values the click was
    actually sampled from, the resulting error probability, and the outcome."""

    trial_id: str
    w_t: float
    t_c: float
    p: float
    t_sub: float
    er_true: float
    success: bool


def write_ground_truth(rows: list[GroundTruthTrial], dest: Optional[IO[str]] = None) -> str:
    buf = io.StringIO()
    buf.write(GROUND_TRUTH_HEADER + "\n")
    for r in rows:
        buf.write(
            f"{r.trial_id},{r.w_t!r},{r.t_c!r},{r.p!r},{r.t_sub!r},{r.er_true!r},"
            f"{1 if r.success else 0}\n"
        )
    text = buf.getvalue()
    if dest is not None:
        dest.write(text)
    return text


def read_ground_truth(source: Union[str, os.PathLike, IO[str], Iterable[str]]) -> list[GroundTruthTrial]:
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            return read_ground_truth(fh)
    rows = []
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        if line_no == 1:
            if line != GROUND_TRUTH_HEADER:
                raise ParseError(f"expected header {GROUND_TRUTH_HEADER!r}", line_no)
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise ParseError(f"expected 7 fields, got {len(parts)}", line_no)
        rows.append(
            GroundTruthTrial(
                trial_id=parts[0],
                w_t=float(parts[1]),
                t_c=float(parts[2]),
                p=float(parts[3]),
                t_sub=float(parts[4]),
                er_true=float(parts[5]),
                success=parts[6] == "1",
            )
        )
    return rows


# --- kinematic building blocks ----------------------------------------------


def minjerk_fraction(x):
    """Normalized minimum-jerk position along a straight segment, s(0)=0, s(1)=1."""
    x = np.asarray(x, dtype=float)
    return x**3 * (10.0 + x * (-15.0 + 6.0 * x))


def chain_position(waypoints: np.ndarray, durations: np.ndarray, tau) -> np.ndarray:
    """Exact pointer position(s) at time(s) tau since motion start.

    The pointer rests at the final waypoint once all segments are finished.
    """
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    starts = np.concatenate([[0.0], np.cumsum(durations)])
    clipped = np.clip(tau, 0.0, starts[-1])
    seg = np.clip(np.searchsorted(starts, clipped, side="right") - 1, 0, len(durations) - 1)
    local = (clipped - starts[seg]) / durations[seg]
    s = minjerk_fraction(local)
    p0 = waypoints[seg]
    p1 = waypoints[seg + 1]
    return p0 + (p1 - p0) * s[:, None]


def _line_circle(p0: np.ndarray, v: np.ndarray, center: np.ndarray, radius: float):
    """(chord, u_entry) for the ray p0 + u*v against the disc; chord 0 on miss.

    Must mirror the measurement-side chord definition: the full line chord,
    zeroed when both intersections lie behind the start point.
    """
    speed2 = float(v @ v)
    if speed2 == 0.0:
        return 0.0, 0.0
    rho = p0 - center
    b = 2.0 * float(rho @ v)
    c = float(rho @ rho) - radius * radius
    disc = b * b - 4.0 * speed2 * c
    if disc <= 0.0:
        return 0.0, 0.0
    sqrt_disc = math.sqrt(disc)
    u2 = (-b + sqrt_disc) / (2.0 * speed2)
    if u2 <= 0.0:
        return 0.0, 0.0
    u1 = (-b - sqrt_disc) / (2.0 * speed2)
    return sqrt_disc / math.sqrt(speed2), u1


@dataclass
class TrialPlan:
    """Pass-1 randomness for one trial: everything drawn independently of the
    session timeline, so trials can be planned in parallel."""

    width: float
    target_vel: np.ndarray
    target_pos0: np.ndarray
    counts: int
    durations: np.ndarray
    approach_angle: float
    approach_distance: float
    center_fraction: float
    aim_offset: float
    deliberate_miss: bool
    wander_steps: np.ndarray
    z: float


@dataclass
class RealizedTrial:
    """A trial placed on the session timeline, with analytic ground truth."""

    trial_id: str
    t0: float
    waypoints: np.ndarray
    durations: np.ndarray
    target_pos0: np.ndarray
    target_vel: np.ndarray
    width: float
    t_click: float
    truth: GroundTruthTrial


def trial_plan(cfg: ScenarioConfig, k: int) -> TrialPlan:
    """Deterministic pass-1 draws for trial k (independent substream)."""
    rng = np.random.default_rng([cfg.seed, k])
    width = rng.uniform(*cfg.target_width_mm)
    speed = rng.uniform(*cfg.target_speed_mm_s)
    theta = rng.uniform(0.0, 2.0 * math.pi)
    target_vel = speed * np.array([math.cos(theta), math.sin(theta)])
    margin = WORKSPACE_MARGIN
    target_pos0 = np.array(
        [rng.uniform(margin, WORKSPACE[0] - margin), rng.uniform(margin, WORKSPACE[1] - margin)]
    )
    counts_items = sorted(cfg.submovement_count.items())
    probs = np.array([p for _, p in counts_items])
    counts = int(counts_items[rng.choice(len(counts_items), p=probs / probs.sum())][0])
    durations = rng.uniform(*cfg.submovement_duration_s, size=counts)
    approach_angle = rng.uniform(0.0, 2.0 * math.pi)
    approach_distance = (width / 2.0) * rng.uniform(*cfg.approach_distance_factors)
    center_fraction = rng.uniform(*cfg.center_fractions)
    deliberate = rng.random() < cfg.deliberate_miss_p
    r = width / 2.0
    if deliberate:
        aim_offset = (r * (2.5 + abs(rng.standard_normal()))) * (1 if rng.random() < 0.5 else -1)
    else:
        aim_offset = rng.standard_normal() * cfg.aim_sigma_factor * r
    wander = np.empty((counts - 1, 2))
    for j in range(counts - 1):
        d = rng.uniform(*WANDER_DISTANCE)
        a = rng.uniform(0.0, 2.0 * math.pi)
        wander[j] = [d * math.cos(a), d * math.sin(a)]
    z = rng.standard_normal()
    return TrialPlan(
        width=width,
        target_vel=target_vel,
        target_pos0=target_pos0,
        counts=counts,
        durations=durations,
        approach_angle=approach_angle,
        approach_distance=approach_distance,
        center_fraction=center_fraction,
        aim_offset=aim_offset,
        deliberate_miss=deliberate,
        wander_steps=wander,
        z=z,
    )


def realize_trial(
    cfg: ScenarioConfig, plan: TrialPlan, k: int, t0: float, prev_clicks: list[float]
) -> RealizedTrial:
    """Pass 2: place the planned trial at absolute time t0 and work out the
    analytic features, the click-time sample, and the outcome."""
    dt = 1.0 / cfg.sampling_rate_hz
    r = plan.width / 2.0
    T = plan.durations
    T_last = float(T[-1])
    t_s = t0 + float(np.sum(T[:-1]))
    motion_end = t0 + float(np.sum(T))

    # final approach geometry, anchored at the target position when the last
    # submovement begins
    c_ls = plan.target_pos0 + plan.target_vel * (t_s - t0)
    direction = np.array([math.cos(plan.approach_angle), math.sin(plan.approach_angle)])
    A = c_ls + plan.approach_distance * direction
    aim_center = c_ls + plan.target_vel * (plan.center_fraction * T_last)
    axis = aim_center - A
    norm = float(np.hypot(*axis))
    if norm < 1e-12:
        axis, norm = -direction, 1.0
    n_hat = np.array([-axis[1], axis[0]]) / norm
    aim = aim_center + plan.aim_offset * n_hat
    B = A + (aim - A) / plan.center_fraction

    waypoints = np.empty((plan.counts + 1, 2))
    waypoints[plan.counts] = B
    waypoints[plan.counts - 1] = A
    for j in range(plan.counts - 2, -1, -1):
        waypoints[j] = waypoints[j + 1] - plan.wander_steps[j]

    v_p = (B - A) / T_last
    v_rel = v_p - plan.target_vel
    params = cfg.true_params

    # the relative-velocity abstraction freezes the target at its position
    # when the last submovement starts, so one line-disc intersection gives
    # the crossing width and the entry moment
    chord, u1 = _line_circle(A, v_rel, c_ls, r)
    w_t = chord / float(np.hypot(*v_rel)) if chord > 0.0 else 0.0
    t_c = u1 + params.c_mu * w_t
    t_entry = t_s + u1

    min_click = t0 + 1.5 * dt
    # entry must lie ahead of the submovement start or t_c and P lose meaning
    if w_t > 0.0 and u1 > 0.0 and t_c > 2.0 * dt:
        p_clicks = prev_clicks + [t_entry + params.c_mu * w_t]
        P = (p_clicks[-1] - p_clicks[0]) / max(len(p_clicks) - 1, 1) if len(p_clicks) > 1 \
            else p_clicks[-1] - t0
        x = params.c_mu * w_t + _sigma_of(params, t_c, P) * plan.z
        success = 0.0 <= x <= w_t
        er_true = predict_er(params, w_t, t_c, P)
        t_click = max(t_entry + x, min_click)
    else:
        # miss path: heading never crosses the target (or the geometry is
        # degenerate); the user clicks when the motion ends
        w_t = 0.0
        t_c = T_last
        t_click = max(motion_end, min_click)
        p_clicks = prev_clicks + [t_click]
        P = (p_clicks[-1] - p_clicks[0]) / max(len(p_clicks) - 1, 1) if len(p_clicks) > 1 \
            else p_clicks[-1] - t0
        er_true = predict_er(params, 0.0, t_c, P)
        success = False

    truth = GroundTruthTrial(
        trial_id=f"t{k:05d}",
        w_t=float(w_t),
        t_c=float(t_c),
        p=float(P),
        t_sub=float(t_s),
        er_true=float(er_true),
        success=bool(success),
    )
    return RealizedTrial(
        trial_id=truth.trial_id,
        t0=t0,
        waypoints=waypoints,
        durations=T,
        target_pos0=plan.target_pos0,
        target_vel=plan.target_vel,
        width=plan.width,
        t_click=float(t_click),
        truth=truth,
    )


def _sigma_of(params: IcpParams, t_c: float, P: float) -> float:
    sigma_t = params.c_sigma * P
    sigma_v = params.c_sigma * (1.0 / math.expm1(params.nu * t_c) + params.delta)
    return math.sqrt((sigma_t**2 * sigma_v**2) / (sigma_t**2 + sigma_v**2))


def trial_samples(cfg: ScenarioConfig, real: RealizedTrial) -> list[TrajectorySample]:
    """Sample the realized trial on the time grid; last row is the click."""
    dt = 1.0 / cfg.sampling_rate_hz
    n_moves = int(math.ceil((real.t_click - real.t0) / dt - 1e-9))
    times = real.t0 + dt * np.arange(n_moves)
    times = times[times < real.t_click - 1e-9]
    times = np.append(times, real.t_click)
    tau = times - real.t0
    pointer = chain_position(real.waypoints, real.durations, tau)
    # the closing movement is minimum-jerk in the frame moving with the
    # target (pursuit plus a straight relative chord), so the mean relative
    # velocity keeps its direction however the click truncates the bell;
    # after the chord is done the pointer keeps pace with the target
    tau_s = float(np.sum(real.durations[:-1]))
    T_last = float(real.durations[-1])
    A, B = real.waypoints[-2], real.waypoints[-1]
    closing = (B - A) - real.target_vel * T_last
    late = tau >= tau_s
    frac = minjerk_fraction(np.clip((tau[late] - tau_s) / T_last, 0.0, 1.0))
    pointer[late] = (
        A
        + real.target_vel[None, :] * (tau[late] - tau_s)[:, None]
        + closing[None, :] * frac[:, None]
    )
    target = real.target_pos0[None, :] + real.target_vel[None, :] * (times - real.t0)[:, None]
    return [
        TrajectorySample(
            t=float(times[i]),
            pointer_x=float(pointer[i, 0]),
            pointer_y=float(pointer[i, 1]),
            target_x=float(target[i, 0]),
            target_y=float(target[i, 1]),
        )
        for i in range(len(times))
    ]


def simulate_session(
    cfg: ScenarioConfig, include_log: bool = True
) -> tuple[Optional[SessionLog], list[GroundTruthTrial]]:
    """Generate a full session and its ground-truth sidecar.

    With include_log=False only the (cheap) ground truth is produced; the
    click chain is identical either way, so the two modes agree trial by
    trial for a fixed seed.
    """
    validate_scenario(cfg)
    dt = 1.0 / cfg.sampling_rate_hz
    trials: list[TrialLog] = []
    truths: list[GroundTruthTrial] = []
    clicks: list[float] = []
    t0 = 0.0
    for k in range(cfg.n_trials):
        plan = trial_plan(cfg, k)
        real = realize_trial(cfg, plan, k, t0, clicks)
        truths.append(real.truth)
        if include_log:
            samples = trial_samples(cfg, real)
            trials.append(
                TrialLog(
                    trial_id=real.trial_id,
                    samples=samples,
                    target_width_W=real.width,
                    click_time=samples[-1].t,
                    click_pointer_xy=(samples[-1].pointer_x, samples[-1].pointer_y),
                    success=real.truth.success,
                    prev_click_times=list(clicks),
                )
            )
        clicks.append(real.t_click)
        t0 = real.t_click + dt
    session = None
    if include_log:
        session = SessionLog(
            session_id=cfg.session_id,
            sampling_rate_f=cfg.sampling_rate_hz,
            trials=trials,
        )
        validate_session(session)
    return session, truths
