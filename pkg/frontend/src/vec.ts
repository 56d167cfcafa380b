export interface Vec {
  x: number;
  y: number;
}

export const vec = (x: number, y: number): Vec => ({ x, y });

export function add(a: Vec, b: Vec): Vec {
  return { x: a.x + b.x, y: a.y + b.y };
}

export function sub(a: Vec, b: Vec): Vec {
  return { x: a.x - b.x, y: a.y - b.y };
}

export function scale(a: Vec, k: number): Vec {
  return { x: a.x * k, y: a.y * k };
}

export function dot(a: Vec, b: Vec): number {
  return a.x * b.x + a.y * b.y;
}

export function norm(a: Vec): number {
  return Math.hypot(a.x, a.y);
}

export function dist(a: Vec, b: Vec): number {
  return Math.hypot(a.x - b.x, a.y - b.y);
}

/** Unit vector at angle theta (radians, screen coordinates: y grows down). */
export function unit(theta: number): Vec {
  return { x: Math.cos(theta), y: Math.sin(theta) };
}

/**
 * Reflect velocity v off a surface with (not necessarily unit) normal n.
 * Mirrors the normal component and keeps the tangential one, so speed is
 * preserved up to floating-point rounding.
 */
export function reflect(v: Vec, n: Vec): Vec {
  const n2 = dot(n, n);
  if (n2 === 0) throw new Error("reflect: zero normal");
  const k = (2 * dot(v, n)) / n2;
  return { x: v.x - k * n.x, y: v.y - k * n.y };
}

/** Normalized minimum-jerk displacement fraction, u in [0, 1]. */
export function minjerk(u: number): number {
  const c = Math.min(1, Math.max(0, u));
  return c * c * c * (10 - 15 * c + 6 * c * c);
}
