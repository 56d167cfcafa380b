import { makeRng, validateConfig, type TaskConfig } from "./config";
import { SessionRecorder } from "./logger";
import { BouncingTarget, pairPlacement, type Arena } from "./target";
import { dist, scale, unit, type Vec } from "./vec";

export type BlockEvent =
  | { kind: "move"; t: number; xPx: number; yPx: number }
  | { kind: "click"; t: number; xPx: number; yPx: number }
  | { kind: "resize"; t: number };

export interface DiscView {
  role: "start" | "goal" | "moving";
  /** Center in CSS pixels. */
  center: Vec;
  radiusPx: number;
  visible: boolean;
}

interface StationaryTrial {
  widthMm: number;
  distanceMm: number;
  limitS: number;
  start: Vec;
  goal: Vec;
}

/**
 * One block of trials as a pure event-driven state machine.  The DOM layer
 * (or a scripted driver) feeds pointer events in CSS pixels; everything
 * internal runs in millimeters via the calibration factor.
 *
 * Stationary protocol: click the start disc to begin the trial and start
 * the clock, then click again for the goal disc; the goal disappears when
 * the time limit runs out but the trial still ends with the next click
 * (logged success=0).  Moving protocol: one bouncing disc, every click
 * ends a trial, success means the click landed inside.
 */
export class Block {
  readonly arenaMm: Arena;
  private readonly rec: SessionRecorder;
  private readonly rng: () => number;
  private readonly conditions: StationaryTrial[] = [];
  private trialIndex = 0;
  private clock = -Infinity;
  private phaseName: "arm" | "go" | "done" = "arm";
  private goStartT = 0;
  private cur: StationaryTrial | null = null;
  private moving: BouncingTarget | null = null;

  constructor(
    readonly cfg: TaskConfig,
    readonly arenaPx: { widthPx: number; heightPx: number },
    sessionId = `web-s${cfg.seed}`,
    samplingRateHz: number | null = null,
  ) {
    validateConfig(cfg);
    this.arenaMm = {
      widthMm: arenaPx.widthPx / cfg.pxPerMm,
      heightMm: arenaPx.heightPx / cfg.pxPerMm,
    };
    this.rec = new SessionRecorder(sessionId, samplingRateHz);
    this.rng = makeRng(cfg.seed);
    if (cfg.mode === "stationary") {
      const all: { w: number; d: number; l: number }[] = [];
      for (const w of cfg.widthsMm)
        for (const d of cfg.distancesMm)
          for (const l of cfg.timeLimitsS) all.push({ w, d, l });
      // one seeded shuffle, then cycle; every condition appears before any
      // repeats
      for (let i = all.length - 1; i > 0; i--) {
        const j = Math.floor(this.rng() * (i + 1));
        const tmp = all[i]!;
        all[i] = all[j]!;
        all[j] = tmp;
      }
      for (let k = 0; k < cfg.trialsPerBlock; k++) {
        const c = all[k % all.length]!;
        const angle =
          cfg.startAngleRad + (k % cfg.approachAngles) * ((2 * Math.PI) / cfg.approachAngles);
        const { start, goal } = pairPlacement(this.arenaMm, angle, c.d);
        this.fitsOrThrow(start, c.w, k);
        this.fitsOrThrow(goal, c.w, k);
        this.conditions.push({ widthMm: c.w, distanceMm: c.d, limitS: c.l, start, goal });
      }
      this.cur = this.conditions[0]!;
    } else {
      this.spawnMovingTarget();
      this.phaseName = "go";
    }
  }

  private fitsOrThrow(center: Vec, widthMm: number, k: number): void {
    const r = widthMm / 2;
    if (
      center.x < r || center.x > this.arenaMm.widthMm - r ||
      center.y < r || center.y > this.arenaMm.heightMm - r
    ) {
      throw new Error(
        `trial ${k}: targets do not fit the arena ` +
          `(${this.arenaMm.widthMm.toFixed(0)}x${this.arenaMm.heightMm.toFixed(0)} mm)`,
      );
    }
  }

  private spawnMovingTarget(): void {
    const w = this.cfg.widthsMm[Math.floor(this.rng() * this.cfg.widthsMm.length)]!;
    const r = w / 2;
    const [lo, hi] = this.cfg.speedRangeMmS;
    const speed = lo + this.rng() * (hi - lo);
    const heading = this.rng() * 2 * Math.PI;
    const center = {
      x: r + this.rng() * (this.arenaMm.widthMm - 2 * r),
      y: r + this.rng() * (this.arenaMm.heightMm - 2 * r),
    };
    this.moving = new BouncingTarget(this.arenaMm, r, center, scale(unit(heading), speed));
  }

  get done(): boolean {
    return this.phaseName === "done";
  }

  get invalidated(): boolean {
    return this.rec.invalidated;
  }

  get trialsCompleted(): number {
    return this.rec.trialCount;
  }

  get phase(): "arm" | "go" | "done" {
    return this.phaseName;
  }

  /** Time limit of the trial in progress (stationary mode only). */
  get currentLimitS(): number | null {
    return this.cfg.mode === "stationary" && this.cur !== null ? this.cur.limitS : null;
  }

  /** Scene to draw (and for scripted drivers to aim at), in CSS pixels. */
  discs(t: number): DiscView[] {
    const px = (p: Vec): Vec => ({ x: p.x * this.cfg.pxPerMm, y: p.y * this.cfg.pxPerMm });
    if (this.cfg.mode === "moving") {
      if (this.moving === null || this.done) return [];
      const preview = new BouncingTarget(
        this.arenaMm,
        this.moving.radiusMm,
        this.moving.center,
        this.moving.vel,
      );
      if (Number.isFinite(this.clock) && t > this.clock) preview.advance(t - this.clock);
      return [
        {
          role: "moving",
          center: px(preview.center),
          radiusPx: preview.radiusMm * this.cfg.pxPerMm,
          visible: true,
        },
      ];
    }
    if (this.cur === null || this.done) return [];
    const rPx = (this.cur.widthMm / 2) * this.cfg.pxPerMm;
    const goalVisible =
      this.phaseName === "go" && t - this.goStartT <= this.cur.limitS;
    return [
      { role: "start", center: px(this.cur.start), radiusPx: rPx, visible: this.phaseName === "arm" },
      { role: "goal", center: px(this.cur.goal), radiusPx: rPx, visible: goalVisible },
    ];
  }

  handle(ev: BlockEvent): void {
    if (this.done) return;
    if (ev.kind === "resize") {
      this.rec.invalidate("resize");
      this.rec.abandonOpenTrial();
      this.phaseName = "done";
      return;
    }
    if (!(ev.t >= this.clock) || !Number.isFinite(ev.t)) {
      throw new Error(`event time must not go backwards (${ev.t} after ${this.clock})`);
    }
    const dt = Number.isFinite(this.clock) ? ev.t - this.clock : 0;
    this.clock = ev.t;
    const p: Vec = { x: ev.xPx / this.cfg.pxPerMm, y: ev.yPx / this.cfg.pxPerMm };
    if (this.cfg.mode === "moving") {
      this.moving!.advance(dt);
      this.handleMoving(ev, p);
    } else {
      this.handleStationary(ev, p);
    }
  }

  private ensureTrialOpen(widthMm: number): void {
    if (this.rec.currentTrialId === null) {
      this.rec.beginTrial(`t${String(this.trialIndex).padStart(5, "0")}`, widthMm);
    }
  }

  private handleStationary(ev: BlockEvent & { kind: "move" | "click" }, p: Vec): void {
    const cur = this.cur!;
    this.ensureTrialOpen(cur.widthMm);
    if (ev.kind === "move") {
      this.rec.logMove(ev.t, p, cur.goal);
      return;
    }
    if (this.phaseName === "arm") {
      // the protocol click that arms the trial is a pointer sample, not a
      // trial-ending click row; clicks outside the start disc are strays
      this.rec.logMove(ev.t, p, cur.goal);
      if (dist(p, cur.start) <= cur.widthMm / 2) {
        this.phaseName = "go";
        this.goStartT = ev.t;
      }
      return;
    }
    const inTime = ev.t - this.goStartT <= cur.limitS;
    const hit = dist(p, cur.goal) <= cur.widthMm / 2;
    this.rec.logClick(ev.t, p, cur.goal, hit && inTime);
    this.nextTrial();
    if (this.phaseName !== "done") this.phaseName = "arm";
  }

  private handleMoving(ev: BlockEvent & { kind: "move" | "click" }, p: Vec): void {
    const target = this.moving!;
    this.ensureTrialOpen(target.radiusMm * 2);
    if (ev.kind === "move") {
      this.rec.logMove(ev.t, p, target.center);
      return;
    }
    this.rec.logClick(ev.t, p, target.center, target.contains(p));
    this.nextTrial();
    if (this.phaseName !== "done") this.spawnMovingTarget();
  }

  private nextTrial(): void {
    this.trialIndex += 1;
    if (this.trialIndex >= this.cfg.trialsPerBlock) {
      this.phaseName = "done";
      this.cur = null;
      this.moving = null;
      return;
    }
    if (this.cfg.mode === "stationary") this.cur = this.conditions[this.trialIndex]!;
  }

  exportCsv(): string {
    return this.rec.exportCsv();
  }
}
