"""Kinematic analysis: speed profiles, persistent extrema, submovement
segmentation, and the per-trial predictor variables.

The segmentation pipeline is: differentiate the pointer path into a speed
profile, smooth it with a Gaussian kernel, keep the speed extrema whose
topological persistence exceeds a threshold, and read off every neighboring
minimum-maximum-minimum triplet as one submovement.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTrialError, NoSubmovementError
from .trajlog import TrialLog

DEFAULT_KERNEL_SIGMA = 3.0
DEFAULT_PERSISTENCE_THRESHOLD = 0.2
DEFAULT_MIN_DURATION = 0.050


@dataclass
class SpeedProfile:
    """Pointer speed over time; same length as the trial's sample list."""

    t: np.ndarray
    speed: np.ndarray


@dataclass
class SubMovement:
    """One minimum-maximum-minimum segment of a smoothed speed profile."""

    start_index: int
    peak_index: int
    end_index: int
    t_start: float
    t_peak: float
    t_end: float

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start


@dataclass
class TrialFeatures:
    """Predictor variables of one trial, all derived from its last submovement.

    W_t is the temporal width of the target crossing in seconds (0 when the
    extrapolated pointer path misses the target), t_c the duration from
    submovement start to click, P the mean inter-click period.
    """

    v_p: tuple[float, float]
    v_t: tuple[float, float]
    v_rel: tuple[float, float]
    W_intersect: float
    W_t: float
    t_c: float
    P: float


def speed_profile(trial: TrialLog) -> SpeedProfile:
    """Finite-difference speed of the pointer, in mm/s.

    The first entry is duplicated from the second so the profile has one
    speed per trajectory sample.
    """
    if trial.degenerate:
        raise DegenerateTrialError(
            f"trial {trial.trial_id!r}: need >= 2 samples, got {len(trial.samples)}"
        )
    t = np.array([s.t for s in trial.samples], dtype=float)
    px = np.array([s.pointer_x for s in trial.samples], dtype=float)
    py = np.array([s.pointer_y for s in trial.samples], dtype=float)
    dt = np.diff(t)
    dist = np.hypot(np.diff(px), np.diff(py))
    speed = np.empty_like(t)
    speed[1:] = dist / dt
    speed[0] = speed[1]
    return SpeedProfile(t=t, speed=speed)


def smooth(profile: SpeedProfile, kernel_sigma_samples: float = DEFAULT_KERNEL_SIGMA) -> SpeedProfile:
    """Gaussian smoothing with boundary renormalization.

    The kernel is truncated at +-4 sigma; near the edges the output is divided
    by the kernel mass that actually overlapped the signal, so constants pass
    through unchanged and no artificial zero-padding decay appears.
    """
    if kernel_sigma_samples <= 0:
        raise ValueError(f"kernel_sigma_samples must be > 0, got {kernel_sigma_samples}")
    radius = int(math.ceil(4.0 * kernel_sigma_samples))
    offsets = np.arange(-radius, radius + 1, dtype=float)
    kernel = np.exp(-0.5 * (offsets / kernel_sigma_samples) ** 2)
    kernel /= kernel.sum()
    x = np.asarray(profile.speed, dtype=float)
    # slice the full convolution by hand: numpy's mode="same" returns
    # max(len(x), len(kernel)) values, which is wrong for short profiles
    num = np.convolve(x, kernel, mode="full")[radius:radius + len(x)]
    den = np.convolve(np.ones_like(x), kernel, mode="full")[radius:radius + len(x)]
    return SpeedProfile(t=np.asarray(profile.t, dtype=float).copy(), speed=num / den)


def _watershed_pairs(values: np.ndarray) -> list[tuple[int, int, float]]:
    """Sublevel-set persistence pairing via a union-find sweep.

    Returns (min_index, max_index, persistence) for every non-global minimum.
    Components are born at local minima; when two meet at a merge point the
    younger one (higher birth value, ties broken toward the right) dies there.
    """
    n = len(values)
    order = np.argsort(values, kind="stable")
    parent = np.full(n, -1, dtype=int)
    comp_min = np.full(n, -1, dtype=int)

    def find(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    pairs: list[tuple[int, int, float]] = []
    for i in order:
        left = i - 1 if i > 0 and parent[i - 1] != -1 else None
        right = i + 1 if i + 1 < n and parent[i + 1] != -1 else None
        parent[i] = i
        comp_min[i] = i
        if left is not None and right is None:
            parent[i] = find(left)
        elif right is not None and left is None:
            parent[i] = find(right)
        elif left is not None and right is not None:
            rl, rr = find(left), find(right)
            ml, mr = comp_min[rl], comp_min[rr]
            # elder rule: lower birth value survives, leftmost on ties
            if (values[ml], ml) <= (values[mr], mr):
                elder, dying = rl, mr
            else:
                elder, dying = rr, ml
            pairs.append((int(dying), int(i), float(values[i] - values[dying])))
            parent[rl] = parent[rr] = parent[i] = elder
    return pairs


def _simplified_extrema(values: np.ndarray, threshold: float) -> list[tuple[int, str]]:
    """Alternating (index, 'min'|'max') sequence after persistence filtering.

    Keeps the global minimum and maximum plus both members of every pair whose
    persistence exceeds the threshold, then collapses same-kind runs (several
    survivors of one kind with no opposite extremum between them) down to
    their most extreme member.
    """
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        return []
    if np.all(values == values[0]):
        return [(0, "min")]
    kind: dict[int, str] = {}
    for mn, mx, pers in _watershed_pairs(values):
        if pers > threshold:
            kind[mn] = "min"
            kind[mx] = "max"
    kind[int(np.argmin(values))] = "min"
    kind[int(np.argmax(values))] = "max"

    out: list[tuple[int, str]] = []
    for idx in sorted(kind):
        k = kind[idx]
        if out and out[-1][1] == k:
            prev = out[-1][0]
            better = values[idx] < values[prev] if k == "min" else values[idx] > values[prev]
            if better:
                out[-1] = (idx, k)
        else:
            out.append((idx, k))
    return out


def persistence_extrema(profile: SpeedProfile, threshold: float = DEFAULT_PERSISTENCE_THRESHOLD) -> list[tuple[int, int]]:
    """Persistent (min_index, max_index) pairs of the speed sequence.

    Each surviving minimum is paired with the maximum that follows it; the
    pair containing the global minimum and the global maximum is always
    present (a trailing minimum with no following maximum stays unpaired).
    """
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    seq = _simplified_extrema(np.asarray(profile.speed, dtype=float), threshold)
    pairs = []
    for (i, ki), (j, kj) in zip(seq, seq[1:]):
        if ki == "min" and kj == "max":
            pairs.append((i, j))
    return pairs


def segment_submovements(
    profile: SpeedProfile,
    threshold: float = DEFAULT_PERSISTENCE_THRESHOLD,
    min_duration: float = DEFAULT_MIN_DURATION,
) -> list[SubMovement]:
    """Split a smoothed speed profile into min-max-min submovements.

    Neighboring triplets share their boundary minima.  Triplets lasting less
    than min_duration are discarded; an empty result is allowed and left to
    the caller to handle.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    t = np.asarray(profile.t, dtype=float)
    seq = _simplified_extrema(np.asarray(profile.speed, dtype=float), threshold)
    segments = []
    for a, b, c in zip(seq, seq[1:], seq[2:]):
        if a[1] == "min" and b[1] == "max" and c[1] == "min":
            sm = SubMovement(
                start_index=a[0],
                peak_index=b[0],
                end_index=c[0],
                t_start=float(t[a[0]]),
                t_peak=float(t[b[0]]),
                t_end=float(t[c[0]]),
            )
            if sm.duration >= min_duration:
                segments.append(sm)
    return segments


def trailing_submovement(
    profile: SpeedProfile,
    threshold: float = DEFAULT_PERSISTENCE_THRESHOLD,
    min_duration: float = DEFAULT_MIN_DURATION,
) -> SubMovement | None:
    """The possibly unfinished submovement the profile ends inside.

    Trials end at the click, so the final speed bump often has no closing
    minimum and never forms a full triplet.  Its start is still well defined:
    the persistent minimum right before the last persistent maximum.  Returns
    None when no maximum has a preceding minimum or when less than
    min_duration remains between that start and the end of the profile.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    t = np.asarray(profile.t, dtype=float)
    seq = _simplified_extrema(np.asarray(profile.speed, dtype=float), threshold)
    last_max = next((p for p in range(len(seq) - 1, -1, -1) if seq[p][1] == "max"), None)
    if not last_max:
        return None
    start = seq[last_max - 1][0]
    if t[-1] - t[start] < min_duration:
        return None
    return SubMovement(
        start_index=start,
        peak_index=seq[last_max][0],
        end_index=len(t) - 1,
        t_start=float(t[start]),
        t_peak=float(t[seq[last_max][0]]),
        t_end=float(t[-1]),
    )


def _chord_through_circle(p0: np.ndarray, v: np.ndarray, center: np.ndarray, radius: float) -> float:
    """Length of the chord cut by the line through p0 along v, or 0.0 when the
    forward ray never reaches the circle."""
    speed2 = float(v @ v)
    if speed2 == 0.0:
        return 0.0
    rho = p0 - center
    b = 2.0 * float(rho @ v)
    c = float(rho @ rho) - radius * radius
    disc = b * b - 4.0 * speed2 * c
    if disc <= 0.0:
        return 0.0
    sqrt_disc = math.sqrt(disc)
    u2 = (-b + sqrt_disc) / (2.0 * speed2)
    if u2 <= 0.0:
        return 0.0
    return sqrt_disc / math.sqrt(speed2)


def extract_features(trial: TrialLog, segments: list[SubMovement]) -> TrialFeatures:
    """Predictor variables from the last submovement before the click.

    Velocities are segment displacement over segment-to-click duration, for
    pointer and target alike.  The crossing width W_intersect is the chord of
    the line through the segment-start pointer position along the relative
    velocity, against the target disc frozen at its segment-start position
    (the relative-velocity frame pins the target there, which keeps the entry
    moment physically meaningful for moving targets).
    """
    if not segments:
        raise NoSubmovementError(f"trial {trial.trial_id!r}: no submovement to analyze")
    seg = max(
        (s for s in segments if s.t_start <= trial.click_time),
        key=lambda s: s.t_start,
        default=None,
    )
    if seg is None:
        raise NoSubmovementError(f"trial {trial.trial_id!r}: no submovement before click")

    start = trial.samples[seg.start_index]
    end = trial.samples[-1]
    t_c = trial.click_time - seg.t_start
    if t_c <= 0:
        raise NoSubmovementError(f"trial {trial.trial_id!r}: submovement starts at the click")

    v_p = np.array([end.pointer_x - start.pointer_x, end.pointer_y - start.pointer_y]) / t_c
    v_t = np.array([end.target_x - start.target_x, end.target_y - start.target_y]) / t_c
    v_rel = v_p - v_t

    p0 = np.array([start.pointer_x, start.pointer_y])
    center = np.array([start.target_x, start.target_y])
    w_intersect = _chord_through_circle(p0, v_rel, center, trial.target_width_W / 2.0)
    speed_rel = float(np.hypot(*v_rel))
    w_t = w_intersect / speed_rel if speed_rel > 0 else 0.0

    clicks = list(trial.prev_click_times) + [trial.click_time]
    if len(clicks) >= 2:
        p = float(np.mean(np.diff(clicks)))
    else:
        p = trial.click_time - trial.t0
    return TrialFeatures(
        v_p=(float(v_p[0]), float(v_p[1])),
        v_t=(float(v_t[0]), float(v_t[1])),
        v_rel=(float(v_rel[0]), float(v_rel[1])),
        W_intersect=float(w_intersect),
        W_t=float(w_t),
        t_c=float(t_c),
        P=float(p),
    )


def whole_trial_segment(trial: TrialLog) -> SubMovement:
    """Fallback pseudo-segment spanning the whole inter-click interval, for
    trials where no submovement clears the persistence/duration filters."""
    if trial.degenerate:
        raise DegenerateTrialError(f"trial {trial.trial_id!r}: need >= 2 samples")
    n = len(trial.samples)
    return SubMovement(
        start_index=0,
        peak_index=max(1, n // 2),
        end_index=n - 1,
        t_start=trial.samples[0].t,
        t_peak=trial.samples[max(1, n // 2)].t,
        t_end=trial.samples[-1].t,
    )


def trial_features(
    trial: TrialLog,
    kernel_sigma_samples: float = DEFAULT_KERNEL_SIGMA,
    threshold: float = DEFAULT_PERSISTENCE_THRESHOLD,
    min_duration: float = DEFAULT_MIN_DURATION,
    fallback_whole_trial: bool = False,
) -> TrialFeatures:
    """Full per-trial pipeline: differentiate, smooth, segment, extract.

    Alongside the complete triplets this also offers the trailing (click-
    truncated) submovement to the extractor, so trials clicked mid-movement
    keep their final approach instead of degrading to an earlier segment.
    """
    prof = smooth(speed_profile(trial), kernel_sigma_samples)
    segments = segment_submovements(prof, threshold, min_duration)
    trailing = trailing_submovement(prof, threshold, min_duration)
    if trailing is not None:
        segments = segments + [trailing]
    if not segments and fallback_whole_trial:
        segments = [whole_trial_segment(trial)]
    return extract_features(trial, segments)
