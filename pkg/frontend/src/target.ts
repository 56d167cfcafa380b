import { add, dist, scale, sub, unit, type Vec } from "./vec";

export interface Arena {
  widthMm: number;
  heightMm: number;
}

/** Start/goal disc centers for one stationary trial: the pair straddles the
 * arena center along the approach direction. */
export function pairPlacement(arena: Arena, angle: number, distanceMm: number): {
  start: Vec;
  goal: Vec;
} {
  const c = { x: arena.widthMm / 2, y: arena.heightMm / 2 };
  const half = scale(unit(angle), distanceMm / 2);
  return { start: sub(c, half), goal: add(c, half) };
}

/**
 * A circular target gliding at constant speed and bouncing off the arena
 * walls.  Reflections mirror position and flip one velocity component, so
 * speed is preserved exactly and the center always stays a radius away
 * from every wall (provided the arena is at least a diameter wide).
 */
export class BouncingTarget {
  center: Vec;
  vel: Vec;

  constructor(
    readonly arena: Arena,
    readonly radiusMm: number,
    center: Vec,
    vel: Vec,
  ) {
    const min = radiusMm;
    if (arena.widthMm < 2 * radiusMm || arena.heightMm < 2 * radiusMm) {
      throw new Error("arena smaller than the target");
    }
    if (
      center.x < min || center.x > arena.widthMm - min ||
      center.y < min || center.y > arena.heightMm - min
    ) {
      throw new Error("target must start inside the arena");
    }
    this.center = { ...center };
    this.vel = { ...vel };
  }

  /** Advance the center by dt seconds, folding the straight path back into
   * the arena wall by wall.  Constant velocity between bounces. */
  advance(dt: number): void {
    if (!(dt >= 0)) throw new Error(`advance: dt must be >= 0, got ${dt}`);
    let x = this.center.x + this.vel.x * dt;
    let y = this.center.y + this.vel.y * dt;
    const loX = this.radiusMm;
    const hiX = this.arena.widthMm - this.radiusMm;
    const loY = this.radiusMm;
    const hiY = this.arena.heightMm - this.radiusMm;
    // each fold is one bounce; a long dt can cross the arena several times
    for (let guard = 0; guard < 10_000; guard++) {
      if (x < loX) {
        x = 2 * loX - x;
        this.vel.x = -this.vel.x;
      } else if (x > hiX) {
        x = 2 * hiX - x;
        this.vel.x = -this.vel.x;
      } else if (y < loY) {
        y = 2 * loY - y;
        this.vel.y = -this.vel.y;
      } else if (y > hiY) {
        y = 2 * hiY - y;
        this.vel.y = -this.vel.y;
      } else {
        break;
      }
    }
    this.center = { x, y };
  }

  contains(p: Vec): boolean {
    return dist(p, this.center) <= this.radiusMm;
  }

  get speed(): number {
    return Math.hypot(this.vel.x, this.vel.y);
  }
}
