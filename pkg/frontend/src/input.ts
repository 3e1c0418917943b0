/**
 * Keyboard and gamepad mapping to command messages.
 *
 * Arrow keys (or WASD) and the gamepad stick map to forward / left /
 * right / stop; the frequency slider and phase selector ride along on
 * every command. Repeats are debounced to at most one command per control
 * tick unless the mode itself changes.
 */

import { Command, CommandMode, makeCommand } from "./protocol.js";

const KEY_MAP: Record<string, CommandMode> = {
  ArrowUp: "forward",
  ArrowLeft: "left",
  ArrowRight: "right",
  ArrowDown: "stop",
  w: "forward",
  a: "left",
  d: "right",
  s: "stop",
  " ": "stop",
};

export function keyToMode(key: string): CommandMode | null {
  return KEY_MAP[key] ?? null;
}

/** Stick mapping: x < -0.5 left, x > 0.5 right, y < -0.5 forward, y > 0.5 stop. */
export function gamepadToMode(axes: readonly number[]): CommandMode | null {
  const x = axes[0] ?? 0;
  const y = axes[1] ?? 0;
  if (x < -0.5) return "left";
  if (x > 0.5) return "right";
  if (y < -0.5) return "forward";
  if (y > 0.5) return "stop";
  return null;
}

export class CommandComposer {
  freqHz = 0.5;
  phaseN = 1;
  private tickRate: number;
  private lastMode: CommandMode | null = null;
  private lastSentMs = -Infinity;

  constructor(tickRate = 50) {
    this.tickRate = tickRate;
  }

  setTickRate(tickRate: number): void {
    this.tickRate = tickRate;
  }

  compose(mode: CommandMode): Command {
    return makeCommand(mode, this.phaseN, this.freqHz);
  }

  /**
   * Debounced composition: returns a command when the mode changed or at
   * most once per control tick for repeats, else null.
   */
  maybeCompose(mode: CommandMode, nowMs: number): Command | null {
    const minIntervalMs = 1000 / this.tickRate;
    if (mode === this.lastMode && nowMs - this.lastSentMs < minIntervalMs) {
      return null;
    }
    this.lastMode = mode;
    this.lastSentMs = nowMs;
    return this.compose(mode);
  }

  reset(): void {
    this.lastMode = null;
    this.lastSentMs = -Infinity;
  }
}
