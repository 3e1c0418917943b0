/**
 * Pure scene construction: ClientState -> display list.
 *
 * Keeping this free of canvas calls makes every visual rule testable: the
 * sensor cones are shaded proportionally to the readings at a configurable
 * display scale (x0.1 by default, matching the telemetry plots), the
 * override banner locks the steering indicators, and a protocol error
 * produces a visible error scene instead of a crash.
 */

import { ArenaDoc } from "./protocol.js";
import { ClientState, steeringEnabled } from "./state.js";

export const MOUNT_OFFSET_RAD = (60 * Math.PI) / 180;
export const CONE_FOV_RAD = (20 * Math.PI) / 180;
export const DEFAULT_CONE_SCALE = 0.1;

export interface SceneOptions {
  coneScale?: number;
}

export type SceneItem =
  | { kind: "arena"; w: number; h: number; substrate: string }
  | { kind: "obstacle-circle"; cx: number; cy: number; r: number }
  | { kind: "obstacle-rect"; x: number; y: number; w: number; h: number }
  | { kind: "trail"; points: { x: number; y: number }[] }
  | {
      kind: "cone";
      side: "left" | "right";
      x: number;
      y: number;
      axis: number;
      fov: number;
      length: number;
      hit: boolean;
    }
  | { kind: "robot"; x: number; y: number; psi: number }
  | { kind: "banner"; level: "error" | "override" | "suggest" | "info"; text: string }
  | { kind: "controls"; steering: boolean }
  | { kind: "valve"; name: "ar" | "al" | "pr" | "pl"; on: boolean }
  | { kind: "text"; id: "mode" | "speed" | "connection" | "notice"; text: string };

function arenaItems(arena: ArenaDoc): SceneItem[] {
  const items: SceneItem[] = [
    { kind: "arena", w: arena.bounds.w, h: arena.bounds.h, substrate: arena.substrate },
  ];
  for (const ob of arena.obstacles) {
    if (ob.type === "circle") {
      items.push({ kind: "obstacle-circle", cx: ob.cx, cy: ob.cy, r: ob.r });
    } else {
      items.push({ kind: "obstacle-rect", x: ob.x, y: ob.y, w: ob.w, h: ob.h });
    }
  }
  return items;
}

export function buildScene(state: ClientState, opts: SceneOptions = {}): SceneItem[] {
  const coneScale = opts.coneScale ?? DEFAULT_CONE_SCALE;
  const items: SceneItem[] = [];

  if (state.protocolError) {
    items.push({ kind: "banner", level: "error", text: state.protocolError });
    items.push({ kind: "text", id: "connection", text: state.status });
    return items;
  }

  if (state.arena) {
    items.push(...arenaItems(state.arena));
  }

  const snap = state.latest;
  if (snap) {
    if (state.trail.length > 1) {
      items.push({
        kind: "trail",
        points: state.trail.map((p) => ({ x: p.x, y: p.y })),
      });
    }
    items.push({
      kind: "cone",
      side: "left",
      x: snap.pose.x,
      y: snap.pose.y,
      axis: snap.pose.psi + MOUNT_OFFSET_RAD,
      fov: CONE_FOV_RAD,
      length: snap.sensors.dl * coneScale,
      hit: snap.sensors.hit_l,
    });
    items.push({
      kind: "cone",
      side: "right",
      x: snap.pose.x,
      y: snap.pose.y,
      axis: snap.pose.psi - MOUNT_OFFSET_RAD,
      fov: CONE_FOV_RAD,
      length: snap.sensors.dr * coneScale,
      hit: snap.sensors.hit_r,
    });
    items.push({ kind: "robot", x: snap.pose.x, y: snap.pose.y, psi: snap.pose.psi });

    for (const name of ["ar", "al", "pr", "pl"] as const) {
      items.push({ kind: "valve", name, on: snap.valves[name] });
    }
    items.push({ kind: "text", id: "mode", text: snap.mode });
    items.push({ kind: "text", id: "speed", text: `${snap.speed.toFixed(2)} mm/s` });

    if (snap.alert === "override_left" || snap.alert === "override_right") {
      const side = snap.alert === "override_left" ? "LEFT" : "RIGHT";
      items.push({
        kind: "banner",
        level: "override",
        text: `OVERRIDE: forced turn ${side}`,
      });
    } else if (snap.alert === "suggest_left" || snap.alert === "suggest_right") {
      const side = snap.alert === "suggest_left" ? "left" : "right";
      items.push({ kind: "banner", level: "suggest", text: `obstacle: steer ${side}` });
    }
  }

  if (state.haltStatus) {
    items.push({ kind: "banner", level: "info", text: `session halted: ${state.haltStatus}` });
  }
  if (state.staleWarning) {
    items.push({
      kind: "banner",
      level: "info",
      text: "disconnected: commands queued, will flush on reconnect",
    });
  }
  if (state.serverNotice) {
    items.push({ kind: "text", id: "notice", text: state.serverNotice });
  }

  items.push({ kind: "controls", steering: steeringEnabled(state) });
  items.push({ kind: "text", id: "connection", text: state.status });
  return items;
}
