/**
 * Canvas adapter: draws a display list produced by `buildScene`.
 *
 * World coordinates are arena millimeters (y up); the canvas transform
 * fits the arena with a margin and flips y.
 */

import { SceneItem } from "./scene.js";

const COLORS = {
  background: "#10141a",
  arena: "#1c2430",
  arenaEdge: "#3b4a5e",
  obstacle: "#5d6d81",
  trail: "#3f8efc",
  robot: "#f5f7fa",
  coneHit: "rgba(252, 108, 80, 0.45)",
  coneFree: "rgba(63, 142, 252, 0.25)",
  valveOn: "#39d353",
  valveOff: "#30363d",
};

export class CanvasRenderer {
  private ctx: CanvasRenderingContext2D;
  private canvas: HTMLCanvasElement;
  private banner: HTMLElement;
  private readouts: HTMLElement;

  constructor(canvas: HTMLCanvasElement, banner: HTMLElement, readouts: HTMLElement) {
    const ctx = canvas.getContext("2d");
    if (!ctx) {
      throw new Error("2d canvas context unavailable");
    }
    this.ctx = ctx;
    this.canvas = canvas;
    this.banner = banner;
    this.readouts = readouts;
  }

  draw(items: SceneItem[]): void {
    const { ctx, canvas } = this;
    ctx.setTransform(1, 0, 0, 1, 0, 0);
    ctx.fillStyle = COLORS.background;
    ctx.fillRect(0, 0, canvas.width, canvas.height);

    const arena = items.find((i) => i.kind === "arena");
    const texts: string[] = [];
    let bannerText = "";
    let bannerLevel = "";

    if (arena && arena.kind === "arena") {
      const margin = 20;
      const scale = Math.min(
        (canvas.width - 2 * margin) / arena.w,
        (canvas.height - 2 * margin) / arena.h,
      );
      ctx.setTransform(scale, 0, 0, -scale, margin, canvas.height - margin);
      ctx.lineWidth = 2 / scale;

      ctx.fillStyle = COLORS.arena;
      ctx.strokeStyle = COLORS.arenaEdge;
      ctx.fillRect(0, 0, arena.w, arena.h);
      ctx.strokeRect(0, 0, arena.w, arena.h);

      for (const item of items) {
        switch (item.kind) {
          case "obstacle-circle":
            ctx.fillStyle = COLORS.obstacle;
            ctx.beginPath();
            ctx.arc(item.cx, item.cy, item.r, 0, 2 * Math.PI);
            ctx.fill();
            break;
          case "obstacle-rect":
            ctx.fillStyle = COLORS.obstacle;
            ctx.fillRect(item.x, item.y, item.w, item.h);
            break;
          case "trail":
            ctx.strokeStyle = COLORS.trail;
            ctx.beginPath();
            item.points.forEach((p, i) =>
              i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y));
            ctx.stroke();
            break;
          case "cone": {
            ctx.fillStyle = item.hit ? COLORS.coneHit : COLORS.coneFree;
            ctx.beginPath();
            ctx.moveTo(item.x, item.y);
            ctx.arc(item.x, item.y, item.length,
                    item.axis - item.fov / 2, item.axis + item.fov / 2);
            ctx.closePath();
            ctx.fill();
            break;
          }
          case "robot": {
            ctx.fillStyle = COLORS.robot;
            ctx.save();
            ctx.translate(item.x, item.y);
            ctx.rotate(item.psi);
            ctx.beginPath();
            ctx.moveTo(35, 0);
            ctx.lineTo(-25, 14);
            ctx.lineTo(-25, -14);
            ctx.closePath();
            ctx.fill();
            ctx.restore();
            break;
          }
          default:
            break;
        }
      }
    }

    for (const item of items) {
      if (item.kind === "banner") {
        // keep the most severe banner: error > override > suggest > info
        const rank = { error: 3, override: 2, suggest: 1, info: 0 };
        if (!bannerLevel || rank[item.level] > rank[bannerLevel as keyof typeof rank]) {
          bannerText = item.text;
          bannerLevel = item.level;
        }
      } else if (item.kind === "text") {
        texts.push(`${item.id}: ${item.text}`);
      } else if (item.kind === "valve") {
        texts.push(`${item.name}=${item.on ? "1" : "0"}`);
      } else if (item.kind === "controls") {
        texts.push(`steering: ${item.steering ? "enabled" : "LOCKED"}`);
      }
    }

    this.banner.textContent = bannerText;
    this.banner.className = bannerLevel ? `banner ${bannerLevel}` : "banner";
    this.readouts.textContent = texts.join("   ");
  }
}
