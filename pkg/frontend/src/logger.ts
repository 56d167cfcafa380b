import type { Vec } from "./vec";

export const HEADER = "session_id,trial_id,t,px,py,tx,ty,target_w,event,success";

/**
 * Format a float the way the analysis pipeline's own writer does: shortest
 * round-trip decimal, with a trailing ".0" on integral values.
 */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new Error(`fmt: non-finite value ${x}`);
  return Number.isInteger(x) ? x.toFixed(1) : String(x);
}

interface Row {
  trialId: string;
  t: number;
  p: Vec;
  target: Vec;
  widthMm: number;
  click: boolean;
  success: boolean;
}

/**
 * Accumulates one session's rows in memory and serializes them as the
 * canonical CSV.  All coordinates are millimeters by the time they get
 * here; callers convert from CSS pixels with the calibration factor.
 *
 * Invariants enforced at logging time, so driver bugs surface immediately:
 * timestamps strictly increase, every trial is opened before rows are
 * logged and closed by exactly one click, move rows that do not move the
 * pointer are dropped.
 */
export class SessionRecorder {
  private rows: Row[] = [];
  private openTrial: string | null = null;
  private openWidth = 0;
  private lastT = -Infinity;
  private lastPointer: Vec | null = null;
  private trialsDone = 0;
  private invalidReason: string | null = null;

  constructor(
    readonly sessionId: string,
    private readonly samplingRateHz: number | null = null,
    private readonly dpi: number | null = null,
  ) {
    if (sessionId.includes(",") || sessionId.includes("\n")) {
      throw new Error("sessionId must not contain commas or newlines");
    }
  }

  beginTrial(trialId: string, targetWidthMm: number): void {
    if (this.openTrial !== null) {
      throw new Error(`beginTrial(${trialId}): trial ${this.openTrial} still open`);
    }
    if (!(targetWidthMm > 0)) throw new Error(`trial ${trialId}: width must be > 0`);
    if (trialId.includes(",") || trialId.includes("\n")) {
      throw new Error("trialId must not contain commas or newlines");
    }
    this.openTrial = trialId;
    this.openWidth = targetWidthMm;
    this.lastPointer = null;
  }

  logMove(t: number, pointerMm: Vec, targetMm: Vec): void {
    if (this.openTrial === null) throw new Error("logMove: no open trial");
    // raw input events can repeat a position; frames without pointer
    // movement emit no row
    if (
      this.lastPointer !== null &&
      this.lastPointer.x === pointerMm.x &&
      this.lastPointer.y === pointerMm.y
    ) {
      return;
    }
    this.push(t, pointerMm, targetMm, false, false);
  }

  logClick(t: number, pointerMm: Vec, targetMm: Vec, success: boolean): void {
    if (this.openTrial === null) throw new Error("logClick: no open trial");
    this.push(t, pointerMm, targetMm, true, success);
    this.openTrial = null;
    this.trialsDone += 1;
  }

  private push(t: number, p: Vec, target: Vec, click: boolean, success: boolean): void {
    if (!(t > this.lastT)) {
      throw new Error(`timestamps must strictly increase (${t} after ${this.lastT})`);
    }
    for (const v of [t, p.x, p.y, target.x, target.y]) {
      if (!Number.isFinite(v)) throw new Error(`non-finite value at t=${t}`);
    }
    this.rows.push({
      trialId: this.openTrial as string,
      t,
      p,
      target,
      widthMm: this.openWidth,
      click,
      success,
    });
    this.lastT = t;
    this.lastPointer = p;
  }

  /** Mark the whole block as unusable (e.g. window resized mid-block). */
  invalidate(reason: string): void {
    this.invalidReason = reason.replace(/\s+/g, "_");
  }

  /** Drop the rows of the trial in progress; its click will never come. */
  abandonOpenTrial(): void {
    if (this.openTrial === null) return;
    const id = this.openTrial;
    this.rows = this.rows.filter((r) => r.trialId !== id);
    this.openTrial = null;
    this.lastPointer = null;
  }

  get invalidated(): boolean {
    return this.invalidReason !== null;
  }

  get trialCount(): number {
    return this.trialsDone;
  }

  get currentTrialId(): string | null {
    return this.openTrial;
  }

  exportCsv(): string {
    if (this.openTrial !== null) {
      throw new Error(`cannot export: trial ${this.openTrial} has no click yet`);
    }
    if (this.rows.length === 0) throw new Error("cannot export: no rows logged");
    const lines: string[] = [];
    lines.push(`# sampling_rate_hz=${fmt(this.samplingRateHz ?? this.medianRate())}`);
    if (this.dpi !== null) lines.push(`# dpi=${fmt(this.dpi)}`);
    if (this.invalidReason !== null) lines.push(`# invalidated=${this.invalidReason}`);
    lines.push(HEADER);
    for (const r of this.rows) {
      lines.push(
        [
          this.sessionId,
          r.trialId,
          fmt(r.t),
          fmt(r.p.x),
          fmt(r.p.y),
          fmt(r.target.x),
          fmt(r.target.y),
          fmt(r.widthMm),
          r.click ? "click" : "move",
          r.click ? (r.success ? "1" : "0") : "",
        ].join(","),
      );
    }
    return lines.join("\n") + "\n";
  }

  /** Nominal rate from the median inter-sample interval within trials. */
  private medianRate(): number {
    const deltas: number[] = [];
    for (let i = 1; i < this.rows.length; i++) {
      const a = this.rows[i - 1]!;
      const b = this.rows[i]!;
      if (a.trialId === b.trialId && b.t > a.t) deltas.push(b.t - a.t);
    }
    if (deltas.length === 0) throw new Error("cannot infer sampling rate");
    deltas.sort((x, y) => x - y);
    const mid = Math.floor(deltas.length / 2);
    const dt = deltas.length % 2 ? deltas[mid]! : 0.5 * (deltas[mid - 1]! + deltas[mid]!);
    return 1 / dt;
  }
}
