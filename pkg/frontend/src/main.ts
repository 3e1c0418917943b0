/** Browser entry point: wires socket, input, slider controls and the canvas. */

import { HmiClient } from "./client.js";
import { CommandComposer, gamepadToMode, keyToMode } from "./input.js";
import { CommandMode } from "./protocol.js";
import { buildScene } from "./scene.js";
import { CanvasRenderer } from "./render.js";
import { steeringEnabled } from "./state.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const url = params.get("server") ?? "ws://127.0.0.1:8765";

  const canvas = byId<HTMLCanvasElement>("arena");
  const renderer = new CanvasRenderer(canvas, byId("banner"), byId("readouts"));
  const freqSlider = byId<HTMLInputElement>("freq");
  const freqLabel = byId("freq-label");
  const phaseSelect = byId<HTMLSelectElement>("phase");

  const composer = new CommandComposer();
  const client = new HmiClient(url, (u) => new WebSocket(u));

  client.onStateChange = (state) => {
    composer.setTickRate(state.tickRate);
  };

  const sendMode = (mode: CommandMode) => {
    const steering = mode === "left" || mode === "right";
    if (steering && !steeringEnabled(client.state)) {
      return; // steering locked while the service overrides
    }
    const cmd = composer.maybeCompose(mode, performance.now());
    if (cmd) client.send(cmd);
  };

  freqSlider.addEventListener("input", () => {
    composer.freqHz = Number(freqSlider.value);
    freqLabel.textContent = `${composer.freqHz.toFixed(2)} Hz`;
  });
  phaseSelect.addEventListener("change", () => {
    composer.phaseN = Number(phaseSelect.value);
  });

  window.addEventListener("keydown", (event) => {
    const mode = keyToMode(event.key);
    if (mode) {
      event.preventDefault();
      sendMode(mode);
    }
  });

  const pollGamepad = () => {
    const pads = navigator.getGamepads?.() ?? [];
    for (const pad of pads) {
      if (!pad) continue;
      const mode = gamepadToMode(pad.axes);
      if (mode) sendMode(mode);
    }
  };

  const frame = () => {
    pollGamepad();
    renderer.draw(buildScene(client.state));
    requestAnimationFrame(frame);
  };

  client.connect();
  requestAnimationFrame(frame);
}

main();
