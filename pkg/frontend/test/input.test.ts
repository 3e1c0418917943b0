import { describe, expect, it } from "vitest";

import { CommandComposer, gamepadToMode, keyToMode } from "../src/input.js";

describe("keyboard mapping", () => {
  it("maps arrows to drive modes", () => {
    expect(keyToMode("ArrowUp")).toBe("forward");
    expect(keyToMode("ArrowLeft")).toBe("left");
    expect(keyToMode("ArrowRight")).toBe("right");
    expect(keyToMode("ArrowDown")).toBe("stop");
    expect(keyToMode("x")).toBeNull();
  });

  it("attaches the current slider and phase values", () => {
    const composer = new CommandComposer(50);
    composer.freqHz = 0.5;
    composer.phaseN = 1;
    const cmd = composer.compose("forward");
    expect(cmd).toEqual({ type: "command", mode: "forward", phase_n: 1, freq_hz: 0.5 });
  });
});

describe("gamepad mapping", () => {
  it("maps stick deflections past 0.5", () => {
    expect(gamepadToMode([-0.6, 0.0])).toBe("left");
    expect(gamepadToMode([0.8, 0.0])).toBe("right");
    expect(gamepadToMode([0.0, -0.7])).toBe("forward");
    expect(gamepadToMode([0.0, 0.9])).toBe("stop");
    expect(gamepadToMode([0.2, -0.2])).toBeNull();
  });
});

describe("debounce", () => {
  it("limits repeats to one command per control tick", () => {
    const composer = new CommandComposer(50); // 20 ms interval
    expect(composer.maybeCompose("forward", 0)).not.toBeNull();
    expect(composer.maybeCompose("forward", 5)).toBeNull();
    expect(composer.maybeCompose("forward", 19)).toBeNull();
    expect(composer.maybeCompose("forward", 21)).not.toBeNull();
  });

  it("lets mode changes through immediately", () => {
    const composer = new CommandComposer(50);
    expect(composer.maybeCompose("forward", 0)).not.toBeNull();
    expect(composer.maybeCompose("left", 1)).not.toBeNull();
    expect(composer.maybeCompose("left", 2)).toBeNull();
  });
});
