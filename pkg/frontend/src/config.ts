export type Mode = "stationary" | "moving";

export interface TaskConfig {
  mode: Mode;
  /** Target diameters in mm. */
  widthsMm: number[];
  /** Center-to-center start/goal distances in mm (stationary mode). */
  distancesMm: number[];
  /** Allowed time from trial start to click, seconds (stationary mode). */
  timeLimitsS: number[];
  /** Target speed range in mm/s, inclusive (moving mode). */
  speedRangeMmS: [number, number];
  trialsPerBlock: number;
  nBlocks: number;
  /** CSS pixels per millimeter, entered by the user after calibration. */
  pxPerMm: number;
  /** Number of approach directions cycled per trial (stationary mode). */
  approachAngles: number;
  /** First approach direction in radians, screen coords; the sequence then
   * advances clockwise.  Arbitrary where the cycle starts; 12 o'clock. */
  startAngleRad: number;
  seed: number;
}

export const STATIONARY_DEFAULTS: TaskConfig = {
  mode: "stationary",
  widthsMm: [4.8, 8.4],
  distancesMm: [48, 144, 240],
  timeLimitsS: [0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
  speedRangeMmS: [0, 0],
  trialsPerBlock: 72,
  nBlocks: 5,
  pxPerMm: 4,
  approachAngles: 20,
  startAngleRad: -Math.PI / 2,
  seed: 1,
};

export const MOVING_DEFAULTS: TaskConfig = {
  mode: "moving",
  widthsMm: [9.6, 14.4, 19.2, 24.0],
  distancesMm: [],
  timeLimitsS: [],
  speedRangeMmS: [0, 510],
  trialsPerBlock: 80,
  nBlocks: 5,
  pxPerMm: 4,
  approachAngles: 20,
  startAngleRad: -Math.PI / 2,
  seed: 1,
};

/** Returns a list of problems; empty means the config is usable. */
export function configProblems(cfg: TaskConfig): string[] {
  const out: string[] = [];
  const positive = (v: number) => Number.isFinite(v) && v > 0;
  if (cfg.mode !== "stationary" && cfg.mode !== "moving") {
    out.push(`unknown mode ${String(cfg.mode)}`);
  }
  if (cfg.widthsMm.length === 0 || !cfg.widthsMm.every(positive)) {
    out.push("widthsMm must be a non-empty list of positive numbers");
  }
  if (cfg.mode === "stationary") {
    if (cfg.distancesMm.length === 0 || !cfg.distancesMm.every(positive)) {
      out.push("distancesMm must be a non-empty list of positive numbers");
    }
    if (cfg.timeLimitsS.length === 0 || !cfg.timeLimitsS.every(positive)) {
      out.push("timeLimitsS must be a non-empty list of positive numbers");
    }
  }
  if (cfg.mode === "moving") {
    const [lo, hi] = cfg.speedRangeMmS;
    if (!Number.isFinite(lo) || !Number.isFinite(hi) || lo < 0 || hi < lo) {
      out.push("speedRangeMmS must be 0 <= lo <= hi");
    }
  }
  if (!Number.isInteger(cfg.trialsPerBlock) || cfg.trialsPerBlock <= 0) {
    out.push("trialsPerBlock must be a positive integer");
  }
  if (!Number.isInteger(cfg.nBlocks) || cfg.nBlocks <= 0) {
    out.push("nBlocks must be a positive integer");
  }
  if (!positive(cfg.pxPerMm)) out.push("pxPerMm must be positive");
  if (!Number.isInteger(cfg.approachAngles) || cfg.approachAngles <= 0) {
    out.push("approachAngles must be a positive integer");
  }
  if (!Number.isFinite(cfg.startAngleRad)) out.push("startAngleRad must be finite");
  return out;
}

export function validateConfig(cfg: TaskConfig): void {
  const problems = configProblems(cfg);
  if (problems.length > 0) throw new Error(`bad TaskConfig: ${problems.join("; ")}`);
}

/**
 * Deterministic 32-bit PRNG (mulberry32); good enough for condition
 * shuffling and jitter, and keeps scripted blocks reproducible.
 */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}
