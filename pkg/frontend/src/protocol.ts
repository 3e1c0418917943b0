/**
 * Wire protocol types and validation for the crawlsim WebSocket service.
 *
 * Mirrors the server's JSON schema exactly; `parseServerMessage` rejects
 * anything off-contract with a ProtocolError so the UI can show a visible
 * error state instead of rendering garbage.
 */

export const PROTOCOL_VERSION = 1;

export class ProtocolError extends Error {}

export interface WirePose {
  x: number;
  y: number;
  psi: number;
}

export interface WireSensors {
  dl: number;
  dr: number;
  hit_l: boolean;
  hit_r: boolean;
}

export interface WireValves {
  ar: boolean;
  al: boolean;
  pr: boolean;
  pl: boolean;
}

export type AlertKind =
  | "none"
  | "suggest_left"
  | "suggest_right"
  | "override_left"
  | "override_right";

export interface Snapshot {
  type: "snapshot";
  tick: number;
  t: number;
  pose: WirePose;
  sensors: WireSensors;
  valves: WireValves;
  alert: AlertKind;
  mode: string;
  speed: number;
}

export interface CircleObstacle {
  type: "circle";
  cx: number;
  cy: number;
  r: number;
}

export interface RectObstacle {
  type: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
}

export type Obstacle = CircleObstacle | RectObstacle;

export interface ArenaDoc {
  bounds: { w: number; h: number };
  obstacles: Obstacle[];
  substrate: "coarse" | "fine";
}

export interface Hello {
  type: "hello";
  version: number;
  tick_rate: number;
  arena: ArenaDoc;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export interface StatusMessage {
  type: "status";
  status: string;
  tick: number;
}

export type ServerMessage = Hello | Snapshot | ErrorMessage | StatusMessage;

export type CommandMode = "forward" | "left" | "right" | "stop";

export interface Command {
  type: "command";
  mode: CommandMode;
  phase_n: number;
  freq_hz: number;
}

const ALERTS: AlertKind[] = [
  "none",
  "suggest_left",
  "suggest_right",
  "override_left",
  "override_right",
];

function isNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function isBool(v: unknown): v is boolean {
  return typeof v === "boolean";
}

function checkPose(v: any): WirePose {
  if (!v || !isNumber(v.x) || !isNumber(v.y) || !isNumber(v.psi)) {
    throw new ProtocolError("snapshot pose malformed");
  }
  return v;
}

function checkSensors(v: any): WireSensors {
  if (!v || !isNumber(v.dl) || !isNumber(v.dr) || !isBool(v.hit_l) || !isBool(v.hit_r)) {
    throw new ProtocolError("snapshot sensors malformed");
  }
  return v;
}

function checkValves(v: any): WireValves {
  if (!v || !isBool(v.ar) || !isBool(v.al) || !isBool(v.pr) || !isBool(v.pl)) {
    throw new ProtocolError("snapshot valves malformed");
  }
  return v;
}

function checkArena(v: any): ArenaDoc {
  if (!v || !v.bounds || !isNumber(v.bounds.w) || !isNumber(v.bounds.h)) {
    throw new ProtocolError("arena bounds malformed");
  }
  if (!Array.isArray(v.obstacles)) {
    throw new ProtocolError("arena obstacles malformed");
  }
  for (const ob of v.obstacles) {
    if (ob.type === "circle") {
      if (!isNumber(ob.cx) || !isNumber(ob.cy) || !isNumber(ob.r)) {
        throw new ProtocolError("circle obstacle malformed");
      }
    } else if (ob.type === "rect") {
      if (!isNumber(ob.x) || !isNumber(ob.y) || !isNumber(ob.w) || !isNumber(ob.h)) {
        throw new ProtocolError("rect obstacle malformed");
      }
    } else {
      throw new ProtocolError(`unknown obstacle type: ${ob.type}`);
    }
  }
  return v;
}

export function parseServerMessage(raw: string): ServerMessage {
  let doc: any;
  try {
    doc = JSON.parse(raw);
  } catch {
    throw new ProtocolError("frame is not valid JSON");
  }
  switch (doc.type) {
    case "hello": {
      if (!isNumber(doc.version) || !isNumber(doc.tick_rate)) {
        throw new ProtocolError("hello malformed");
      }
      checkArena(doc.arena);
      return doc as Hello;
    }
    case "snapshot": {
      if (!isNumber(doc.tick) || !isNumber(doc.t) || !isNumber(doc.speed)) {
        throw new ProtocolError("snapshot malformed");
      }
      checkPose(doc.pose);
      checkSensors(doc.sensors);
      checkValves(doc.valves);
      if (!ALERTS.includes(doc.alert)) {
        throw new ProtocolError(`unknown alert: ${doc.alert}`);
      }
      if (typeof doc.mode !== "string") {
        throw new ProtocolError("snapshot mode malformed");
      }
      return doc as Snapshot;
    }
    case "error": {
      if (typeof doc.message !== "string") {
        throw new ProtocolError("error message malformed");
      }
      return doc as ErrorMessage;
    }
    case "status": {
      if (typeof doc.status !== "string") {
        throw new ProtocolError("status malformed");
      }
      return doc as StatusMessage;
    }
    default:
      throw new ProtocolError(`unknown message type: ${doc.type}`);
  }
}

export function makeCommand(mode: CommandMode, phaseN: number, freqHz: number): Command {
  if (![0, 1, 2, 3].includes(phaseN)) {
    throw new ProtocolError(`phase index out of range: ${phaseN}`);
  }
  if (!(freqHz >= 0.1 && freqHz <= 1.5)) {
    throw new ProtocolError(`frequency out of range: ${freqHz}`);
  }
  return { type: "command", mode, phase_n: phaseN, freq_hz: freqHz };
}

export function encodeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}
