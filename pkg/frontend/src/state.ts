/**
 * Client state and pure reducers.
 *
 * The client never predicts: the displayed pose is always the last
 * server-confirmed snapshot, commands echo locally into `pendingCommand`
 * but touch nothing else, and a reconnect drops all simulation truth so
 * the next snapshot resynchronizes the view completely.
 */

import {
  ArenaDoc,
  Command,
  ProtocolError,
  PROTOCOL_VERSION,
  ServerMessage,
  Snapshot,
  WirePose,
  parseServerMessage,
} from "./protocol.js";

export type ConnectionStatus = "disconnected" | "connecting" | "connected";

export const TRAIL_LIMIT = 2000;

export interface ClientState {
  status: ConnectionStatus;
  protocolError: string | null;
  serverNotice: string | null;
  arena: ArenaDoc | null;
  tickRate: number;
  latest: Snapshot | null;
  trail: WirePose[];
  pendingCommand: Command | null;
  queued: Command[];
  staleWarning: boolean;
  haltStatus: string | null;
  snapshotsReceived: number;
}

export function initialState(): ClientState {
  return {
    status: "disconnected",
    protocolError: null,
    serverNotice: null,
    arena: null,
    tickRate: 50,
    latest: null,
    trail: [],
    pendingCommand: null,
    queued: [],
    staleWarning: false,
    haltStatus: null,
    snapshotsReceived: 0,
  };
}

export function onConnecting(state: ClientState): ClientState {
  return { ...state, status: "connecting" };
}

export function onOpen(state: ClientState): ClientState {
  // Drop all simulation truth: the next snapshot resynchronizes the view.
  return {
    ...state,
    status: "connected",
    protocolError: null,
    serverNotice: null,
    latest: null,
    trail: [],
    haltStatus: null,
  };
}

export function onClose(state: ClientState): ClientState {
  return { ...state, status: "disconnected" };
}

export function onMessage(state: ClientState, raw: string): ClientState {
  let msg: ServerMessage;
  try {
    msg = parseServerMessage(raw);
  } catch (err) {
    if (err instanceof ProtocolError) {
      return { ...state, protocolError: err.message };
    }
    throw err;
  }
  switch (msg.type) {
    case "hello": {
      if (msg.version !== PROTOCOL_VERSION) {
        return {
          ...state,
          protocolError: `server speaks protocol v${msg.version}, client v${PROTOCOL_VERSION}`,
        };
      }
      return { ...state, arena: msg.arena, tickRate: msg.tick_rate };
    }
    case "snapshot": {
      const trail = state.trail.length >= TRAIL_LIMIT
        ? [...state.trail.slice(1), msg.pose]
        : [...state.trail, msg.pose];
      return {
        ...state,
        latest: msg,
        trail,
        snapshotsReceived: state.snapshotsReceived + 1,
      };
    }
    case "status":
      return { ...state, haltStatus: msg.status };
    case "error":
      return { ...state, serverNotice: msg.message };
  }
}

export interface QueueResult {
  state: ClientState;
  send: Command | null;
}

/** Register operator intent; returns the command to transmit, if connected. */
export function submitCommand(state: ClientState, cmd: Command): QueueResult {
  if (state.status === "connected") {
    return { state: { ...state, pendingCommand: cmd, staleWarning: false }, send: cmd };
  }
  return {
    state: {
      ...state,
      pendingCommand: cmd,
      queued: [...state.queued, cmd],
      staleWarning: true,
    },
    send: null,
  };
}

export interface FlushResult {
  state: ClientState;
  toSend: Command[];
}

/** On reconnect, flush commands queued while offline (latest wins last). */
export function flushQueue(state: ClientState): FlushResult {
  if (state.queued.length === 0) {
    return { state, toSend: [] };
  }
  return {
    state: { ...state, queued: [], staleWarning: false },
    toSend: [state.queued[state.queued.length - 1]],
  };
}

/** Steering is locked out while the service reports a forced override. */
export function steeringEnabled(state: ClientState): boolean {
  const alert = state.latest?.alert;
  return !(alert === "override_left" || alert === "override_right");
}
