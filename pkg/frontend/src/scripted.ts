import type { Block, DiscView } from "./block";
import { makeRng } from "./config";
import { add, minjerk, scale, sub, unit, type Vec } from "./vec";

export interface ScriptOptions {
  /** Synthetic pointer event rate. */
  rateHz?: number;
  /** Every Nth goal click aims just outside the disc (0 disables). */
  missEvery?: number;
  /** Every Nth stationary trial clicks after the time limit (0 disables). */
  lateEvery?: number;
  seed?: number;
  /** Pointer position when the block starts, CSS pixels. */
  startPx?: Vec;
}

/**
 * Drive a block to completion with synthetic pointer events: minimum-jerk
 * strokes toward each required click, at a fixed event rate, with seeded
 * aim jitter.  This is the "user" behind scripted exports and tests; it
 * goes through the exact same handle() boundary as DOM events.
 */
export function runScripted(block: Block, opts: ScriptOptions = {}): Block {
  const rate = opts.rateHz ?? 125;
  const missEvery = opts.missEvery ?? 0;
  const lateEvery = opts.lateEvery ?? 0;
  const rng = makeRng(opts.seed ?? 9);
  const dt = 1 / rate;
  let t = 0;
  let p: Vec = opts.startPx ?? { x: 8, y: 8 };
  let goalsClicked = 0;

  const jitterInside = (radiusPx: number): Vec =>
    scale(unit(rng() * 2 * Math.PI), 0.4 * radiusPx * Math.sqrt(rng()));

  const strokeAndClick = (aim: Vec, durationS: number): void => {
    const from = p;
    const move = sub(aim, from);
    const steps = Math.max(4, Math.round(durationS * rate));
    for (let i = 1; i < steps; i++) {
      t += dt;
      p = add(from, scale(move, minjerk(i / steps)));
      block.handle({ kind: "move", t, xPx: p.x, yPx: p.y });
      if (block.done) return;
    }
    t += dt;
    p = aim;
    block.handle({ kind: "click", t, xPx: p.x, yPx: p.y });
  };

  const visible = (scene: DiscView[], role: DiscView["role"]): DiscView | undefined =>
    scene.find((d) => d.role === role && d.visible);

  // anchor the block clock so moving-target previews line up with the
  // integration the strokes will drive
  block.handle({ kind: "move", t, xPx: p.x, yPx: p.y });

  let guard = 0;
  while (!block.done) {
    if (++guard > 10 * block.cfg.trialsPerBlock + 100) {
      throw new Error("scripted driver is not making progress");
    }
    if (block.cfg.mode === "stationary") {
      if (block.phase === "arm") {
        const start = visible(block.discs(t), "start");
        if (!start) throw new Error("arm phase but no start disc visible");
        strokeAndClick(add(start.center, jitterInside(start.radiusPx)), 0.35);
        // the reach starts right away: the arming click starts the clock
        continue;
      } else {
        const limit = block.currentLimitS ?? 0.5;
        const goal = block.discs(t).find((d) => d.role === "goal");
        if (!goal) throw new Error("go phase but no goal disc");
        goalsClicked += 1;
        const late = lateEvery > 0 && goalsClicked % lateEvery === 0;
        const miss = missEvery > 0 && goalsClicked % missEvery === 0;
        const aim = miss
          ? add(goal.center, scale(unit(rng() * 2 * Math.PI), goal.radiusPx + 6))
          : add(goal.center, jitterInside(goal.radiusPx));
        strokeAndClick(aim, late ? 1.4 * limit : 0.7 * limit);
      }
    } else {
      const horizon = 0.4;
      // the preview integrates the same deterministic bounce model, so the
      // predicted center is where the disc will actually be at click time
      const ahead = visible(block.discs(t + horizon), "moving");
      if (!ahead) throw new Error("moving mode but no disc");
      goalsClicked += 1;
      const miss = missEvery > 0 && goalsClicked % missEvery === 0;
      const aim = miss
        ? add(ahead.center, scale(unit(rng() * 2 * Math.PI), ahead.radiusPx + 6))
        : add(ahead.center, jitterInside(ahead.radiusPx));
      strokeAndClick(aim, horizon);
    }
    // settle between clicks; no pointer movement, so no rows
    t += 0.12;
  }
  return block;
}
