import { Block } from "./block";
import {
  configProblems,
  MOVING_DEFAULTS,
  STATIONARY_DEFAULTS,
  type Mode,
  type TaskConfig,
} from "./config";
import type { DiscView } from "./block";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const RULER_PX = 200;

function numList(raw: string): number[] {
  return raw
    .split(",")
    .map((s) => s.trim())
    .filter((s) => s.length > 0)
    .map(Number);
}

function readConfig(): TaskConfig {
  const mode = ($("mode") as HTMLSelectElement).value as Mode;
  const base = mode === "stationary" ? STATIONARY_DEFAULTS : MOVING_DEFAULTS;
  const rulerMm = Number(($("ruler-mm") as HTMLInputElement).value);
  return {
    ...base,
    mode,
    widthsMm: numList(($("widths") as HTMLInputElement).value),
    distancesMm: mode === "stationary" ? numList(($("distances") as HTMLInputElement).value) : [],
    timeLimitsS: mode === "stationary" ? numList(($("limits") as HTMLInputElement).value) : [],
    speedRangeMmS: [
      Number(($("speed-lo") as HTMLInputElement).value),
      Number(($("speed-hi") as HTMLInputElement).value),
    ],
    trialsPerBlock: Number(($("trials") as HTMLInputElement).value),
    nBlocks: Number(($("blocks") as HTMLInputElement).value),
    pxPerMm: RULER_PX / rulerMm,
    seed: Number(($("seed") as HTMLInputElement).value),
  };
}

function drawScene(ctx: CanvasRenderingContext2D, discs: DiscView[]): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  for (const d of discs) {
    if (!d.visible) continue;
    ctx.beginPath();
    ctx.arc(d.center.x, d.center.y, d.radiusPx, 0, 2 * Math.PI);
    ctx.fillStyle = d.role === "start" ? "#2a6df4" : "#e34040";
    ctx.fill();
  }
}

function download(name: string, text: string): void {
  const a = document.createElement("a");
  a.href = URL.createObjectURL(new Blob([text], { type: "text/csv" }));
  a.download = name;
  a.click();
  URL.revokeObjectURL(a.href);
}

/** Wire one block to the canvas; resolves when the block ends. */
function runBlock(cfg: TaskConfig, index: number, canvas: HTMLCanvasElement): Promise<Block> {
  return new Promise((resolve) => {
    canvas.width = Math.max(400, window.innerWidth - 40);
    canvas.height = Math.max(300, window.innerHeight - 220);
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("canvas 2d context unavailable");
    const block = new Block(
      cfg,
      { widthPx: canvas.width, heightPx: canvas.height },
      `web-s${cfg.seed}b${index}`,
    );
    const t0 = performance.now();
    const now = () => (performance.now() - t0) / 1000;
    let lastT = -Infinity;

    const onMove = (e: PointerEvent) => {
      const t = now();
      // pointer batches can repeat a timestamp; moves are droppable
      if (t <= lastT) return;
      lastT = t;
      block.handle({ kind: "move", t, xPx: e.offsetX, yPx: e.offsetY });
    };
    const onDown = (e: PointerEvent) => {
      // clicks are not droppable, so nudge coincident timestamps
      const t = Math.max(now(), lastT + 1e-4);
      lastT = t;
      block.handle({ kind: "click", t, xPx: e.offsetX, yPx: e.offsetY });
    };
    const onResize = () => block.handle({ kind: "resize", t: Math.max(now(), lastT + 1e-4) });

    canvas.addEventListener("pointermove", onMove);
    canvas.addEventListener("pointerdown", onDown);
    window.addEventListener("resize", onResize);

    const status = $("status");
    const tick = () => {
      if (block.done) {
        canvas.removeEventListener("pointermove", onMove);
        canvas.removeEventListener("pointerdown", onDown);
        window.removeEventListener("resize", onResize);
        drawScene(ctx, []);
        resolve(block);
        return;
      }
      drawScene(ctx, block.discs(now()));
      status.textContent =
        `block ${index + 1}/${cfg.nBlocks} - trial ` +
        `${Math.min(block.trialsCompleted + 1, cfg.trialsPerBlock)}/${cfg.trialsPerBlock}` +
        (cfg.mode === "stationary" && block.phase === "arm"
          ? " - click the blue disc to begin"
          : "");
      requestAnimationFrame(tick);
    };
    requestAnimationFrame(tick);
  });
}

async function runSession(cfg: TaskConfig, canvas: HTMLCanvasElement): Promise<void> {
  const status = $("status");
  for (let i = 0; i < cfg.nBlocks; i++) {
    const block = await runBlock(cfg, i, canvas);
    if (block.trialsCompleted > 0) {
      download(`session_s${cfg.seed}_block${i}.csv`, block.exportCsv());
    }
    if (block.invalidated) {
      status.textContent =
        `block ${i + 1} invalidated by a window resize ` +
        `(export flagged, ${block.trialsCompleted} trials kept) - press start to rerun`;
      return;
    }
  }
  status.textContent = "session complete - all blocks exported";
}

function syncModeFields(): void {
  const mode = ($("mode") as HTMLSelectElement).value as Mode;
  const stationary = mode === "stationary";
  $("stationary-fields").style.display = stationary ? "" : "none";
  $("moving-fields").style.display = stationary ? "none" : "";
  const d = stationary ? STATIONARY_DEFAULTS : MOVING_DEFAULTS;
  ($("widths") as HTMLInputElement).value = d.widthsMm.join(", ");
}

function main(): void {
  $("ruler").style.width = `${RULER_PX}px`;
  ($("widths") as HTMLInputElement).value = STATIONARY_DEFAULTS.widthsMm.join(", ");
  ($("distances") as HTMLInputElement).value = STATIONARY_DEFAULTS.distancesMm.join(", ");
  ($("limits") as HTMLInputElement).value = STATIONARY_DEFAULTS.timeLimitsS.join(", ");
  ($("speed-lo") as HTMLInputElement).value = String(MOVING_DEFAULTS.speedRangeMmS[0]);
  ($("speed-hi") as HTMLInputElement).value = String(MOVING_DEFAULTS.speedRangeMmS[1]);
  ($("trials") as HTMLInputElement).value = String(STATIONARY_DEFAULTS.trialsPerBlock);
  ($("blocks") as HTMLInputElement).value = String(STATIONARY_DEFAULTS.nBlocks);
  ($("seed") as HTMLInputElement).value = "1";
  $("mode").addEventListener("change", syncModeFields);
  syncModeFields();

  $("start").addEventListener("click", () => {
    const cfg = readConfig();
    const problems = configProblems(cfg);
    if (!Number.isFinite(cfg.pxPerMm) || cfg.pxPerMm <= 0) {
      problems.push("calibration: enter the measured ruler length in mm");
    }
    if (problems.length > 0) {
      $("status").textContent = `cannot start: ${problems.join("; ")}`;
      return;
    }
    void runSession(cfg, $("stage") as HTMLCanvasElement);
  });
}

main();
