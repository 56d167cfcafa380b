"""Canonical data model and CSV file format for pointing-trial trajectories.

A session file is UTF-8 CSV with the header

    session_id,trial_id,t,px,py,tx,ty,target_w,event,success

preceded by optional comment lines of the form ``# key=value`` carrying
``sampling_rate_hz`` and ``dpi``.  Times are seconds, coordinates and target
widths are millimeters.  ``event`` is ``move`` or ``click``; the ``success``
column is empty except on click rows (0/1).  Every trial is a contiguous run
of rows terminated by exactly one click row.
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Union

from .errors import ParseError, ValidationError

HEADER = ["session_id", "trial_id", "t", "px", "py", "tx", "ty", "target_w", "event", "success"]

MM_PER_INCH = 25.4


@dataclass
class TrajectorySample:
    """One timestamped pointer/target observation."""

    t: float
    pointer_x: float
    pointer_y: float
    target_x: float
    target_y: float


@dataclass
class TrialLog:
    """All samples of one trial, from the previous click to this trial's click.

    ``samples`` includes the click row itself as the final sample.
    ``prev_click_times`` lists the click timestamps of all preceding trials in
    the session, so the inter-click period can be derived per trial.
    """

    trial_id: str
    samples: list[TrajectorySample]
    target_width_W: float
    click_time: float
    click_pointer_xy: tuple[float, float]
    success: bool
    prev_click_times: list[float] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        """True when the trial has fewer than 2 samples; downstream kinematic
        analysis skips such trials instead of silently dropping them."""
        return len(self.samples) < 2

    @property
    def t0(self) -> float:
        return self.samples[0].t


@dataclass
class SessionLog:
    """An ordered collection of trials sharing one device/session."""

    session_id: str
    sampling_rate_f: float
    trials: list[TrialLog]
    device_dpi: Optional[float] = None


def validate_session(session: SessionLog) -> None:
    """Raise ValidationError if any invariant of the data model is violated."""
    if not math.isfinite(session.sampling_rate_f) or session.sampling_rate_f <= 0:
        raise ValidationError(f"sampling_rate_f must be positive, got {session.sampling_rate_f}")
    prev_click = -math.inf
    expected_prev_clicks: list[float] = []
    for trial in session.trials:
        tid = trial.trial_id
        if not trial.samples:
            raise ValidationError(f"trial {tid!r}: no samples")
        if not math.isfinite(trial.target_width_W) or trial.target_width_W <= 0:
            raise ValidationError(f"trial {tid!r}: target_w must be > 0, got {trial.target_width_W}")
        last_t = None
        for s in trial.samples:
            for v in (s.t, s.pointer_x, s.pointer_y, s.target_x, s.target_y):
                if not math.isfinite(v):
                    raise ValidationError(f"trial {tid!r}: non-finite value at t={s.t}")
            if last_t is not None and s.t <= last_t:
                raise ValidationError(
                    f"trial {tid!r}: timestamps not strictly increasing at t={s.t}"
                )
            last_t = s.t
        final = trial.samples[-1]
        if trial.click_time != final.t:
            raise ValidationError(
                f"trial {tid!r}: click_time {trial.click_time} != final sample t {final.t}"
            )
        if trial.click_pointer_xy != (final.pointer_x, final.pointer_y):
            raise ValidationError(f"trial {tid!r}: click_pointer_xy disagrees with final sample")
        if trial.click_time <= prev_click:
            raise ValidationError(
                f"trial {tid!r}: click times not strictly increasing across session"
            )
        if trial.prev_click_times != expected_prev_clicks:
            raise ValidationError(f"trial {tid!r}: prev_click_times inconsistent with session")
        if any(b <= a for a, b in zip(trial.prev_click_times, trial.prev_click_times[1:])):
            raise ValidationError(f"trial {tid!r}: prev_click_times not strictly increasing")
        if trial.prev_click_times and trial.prev_click_times[-1] >= trial.click_time:
            raise ValidationError(f"trial {tid!r}: prev_click_times must precede click_time")
        prev_click = trial.click_time
        expected_prev_clicks = expected_prev_clicks + [trial.click_time]


def _fmt(x: float) -> str:
    return repr(float(x))


def write_session(session: SessionLog, dest: Optional[IO[str]] = None) -> str:
    """Serialize a session to canonical CSV.  Refuses invalid sessions.

    Returns the CSV text; also writes it to ``dest`` when given.  Output is
    deterministic: serializing the same session twice yields identical bytes.
    """
    validate_session(session)
    buf = io.StringIO()
    buf.write(f"# sampling_rate_hz={_fmt(session.sampling_rate_f)}\n")
    if session.device_dpi is not None:
        buf.write(f"# dpi={_fmt(session.device_dpi)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for trial in session.trials:
        n = len(trial.samples)
        for i, s in enumerate(trial.samples):
            is_click = i == n - 1
            writer.writerow(
                [
                    session.session_id,
                    trial.trial_id,
                    _fmt(s.t),
                    _fmt(s.pointer_x),
                    _fmt(s.pointer_y),
                    _fmt(s.target_x),
                    _fmt(s.target_y),
                    _fmt(trial.target_width_W),
                    "click" if is_click else "move",
                    ("1" if trial.success else "0") if is_click else "",
                ]
            )
    text = buf.getvalue()
    if dest is not None:
        dest.write(text)
    return text


def _parse_float(text: str, what: str, line_no: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"bad {what} value {text!r}", line_no) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite {what} value {text!r}", line_no)
    return v


def parse_session(source: Union[str, os.PathLike, IO[str], Iterable[str]],
                  pixel_units: bool = False) -> SessionLog:
    """Parse canonical CSV into a validated SessionLog.

    ``source`` may be a path, an open text stream, or an iterable of lines.
    With ``pixel_units=True`` the coordinate columns are taken to be device
    pixels and converted to millimeters via the ``# dpi=`` header (the header
    is otherwise pure metadata; canonical files already carry millimeters).
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return parse_session(fh, pixel_units=pixel_units)

    meta: dict[str, str] = {}
    header_seen = False
    rows: list[tuple[int, list[str]]] = []
    for line_no, raw in enumerate(source, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            continue
        if line.startswith("#"):
            if header_seen:
                raise ParseError("comment lines must precede the header", line_no)
            body = line.lstrip("#").strip()
            if "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        fields = next(csv.reader([line]))
        if not header_seen:
            if fields != HEADER:
                raise ParseError(f"expected header {','.join(HEADER)!r}", line_no)
            header_seen = True
            continue
        if len(fields) != len(HEADER):
            raise ParseError(f"expected {len(HEADER)} fields, got {len(fields)}", line_no)
        rows.append((line_no, fields))
    if not header_seen:
        raise ParseError("missing header row", line_no=1)

    scale = 1.0
    dpi = None
    if "dpi" in meta:
        dpi = _parse_float(meta["dpi"], "dpi", 1)
        if dpi <= 0:
            raise ParseError(f"dpi must be positive, got {dpi}", 1)
    if pixel_units:
        if dpi is None:
            raise ParseError("pixel_units requires a '# dpi=' header", 1)
        scale = MM_PER_INCH / dpi

    session_id = None
    trials: list[TrialLog] = []
    cur_id: Optional[str] = None
    cur_samples: list[TrajectorySample] = []
    cur_width: Optional[float] = None
    cur_first_line = 0
    clicks: list[float] = []

    def finish_trial(line_no, success_field):
        nonlocal cur_id, cur_samples, cur_width
        if success_field not in ("0", "1"):
            raise ParseError(f"click row needs success 0/1, got {success_field!r}", line_no)
        final = cur_samples[-1]
        trials.append(
            TrialLog(
                trial_id=cur_id,
                samples=cur_samples,
                target_width_W=cur_width,
                click_time=final.t,
                click_pointer_xy=(final.pointer_x, final.pointer_y),
                success=success_field == "1",
                prev_click_times=list(clicks),
            )
        )
        clicks.append(final.t)
        cur_id, cur_samples, cur_width = None, [], None

    for line_no, f in rows:
        sid, tid, t_s, px, py, tx, ty, tw, event, success = f
        if session_id is None:
            session_id = sid
        elif sid != session_id:
            raise ParseError(f"multiple session ids ({session_id!r}, {sid!r})", line_no)
        if event not in ("move", "click"):
            raise ParseError(f"unknown event {event!r}", line_no)
        if event == "move" and success != "":
            raise ParseError("success must be empty on move rows", line_no)
        t = _parse_float(t_s, "t", line_no)
        sample = TrajectorySample(
            t=t,
            pointer_x=_parse_float(px, "px", line_no) * scale,
            pointer_y=_parse_float(py, "py", line_no) * scale,
            target_x=_parse_float(tx, "tx", line_no) * scale,
            target_y=_parse_float(ty, "ty", line_no) * scale,
        )
        width = _parse_float(tw, "target_w", line_no) * scale

        if cur_id is None:
            cur_id, cur_width, cur_first_line = tid, width, line_no
        elif tid != cur_id:
            raise ValidationError(
                f"trial {cur_id!r} (line {cur_first_line}) has no terminating click row"
            )
        elif width != cur_width:
            raise ValidationError(f"trial {tid!r}: target_w changes mid-trial (line {line_no})")
        cur_samples.append(sample)
        if event == "click":
            finish_trial(line_no, success)

    if cur_id is not None:
        raise ValidationError(f"trial {cur_id!r} (line {cur_first_line}) has no terminating click row")

    if "sampling_rate_hz" in meta:
        rate = _parse_float(meta["sampling_rate_hz"], "sampling_rate_hz", 1)
    else:
        rate = _infer_sampling_rate(trials)
    session = SessionLog(
        session_id=session_id if session_id is not None else "",
        sampling_rate_f=rate,
        trials=trials,
        device_dpi=dpi,
    )
    validate_session(session)
    return session


def _infer_sampling_rate(trials: list[TrialLog]) -> float:
    """Median inter-sample interval, used when the header omits the rate."""
    deltas = []
    for trial in trials:
        ts = [s.t for s in trial.samples]
        deltas.extend(b - a for a, b in zip(ts, ts[1:]) if b > a)
    if not deltas:
        raise ValidationError("cannot infer sampling rate: no inter-sample intervals")
    deltas.sort()
    mid = len(deltas) // 2
    dt = deltas[mid] if len(deltas) % 2 else 0.5 * (deltas[mid - 1] + deltas[mid])
    return 1.0 / dt
