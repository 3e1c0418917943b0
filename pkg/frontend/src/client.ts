/**
 * WebSocket client: owns the socket lifecycle and feeds the state reducers.
 *
 * The socket constructor is injected so tests can run against the `ws`
 * package in Node while the browser uses the native WebSocket.
 */

import { Command, encodeCommand } from "./protocol.js";
import {
  ClientState,
  flushQueue,
  initialState,
  onClose,
  onConnecting,
  onMessage,
  onOpen,
  submitCommand,
} from "./state.js";

export interface SocketLike {
  send(data: string): void;
  close(): void;
  onopen: ((ev: any) => void) | null;
  onclose: ((ev: any) => void) | null;
  onmessage: ((event: any) => void) | null;
}

export type SocketFactory = (url: string) => SocketLike;

export class HmiClient {
  state: ClientState = initialState();
  onStateChange: ((state: ClientState) => void) | null = null;

  private url: string;
  private factory: SocketFactory;
  private socket: SocketLike | null = null;
  private reconnectDelayMs: number;
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closedByUser = false;

  constructor(url: string, factory: SocketFactory, reconnectDelayMs = 1000) {
    this.url = url;
    this.factory = factory;
    this.reconnectDelayMs = reconnectDelayMs;
  }

  private update(state: ClientState): void {
    this.state = state;
    this.onStateChange?.(state);
  }

  connect(): void {
    this.closedByUser = false;
    this.update(onConnecting(this.state));
    const socket = this.factory(this.url);
    this.socket = socket;
    socket.onopen = () => {
      this.update(onOpen(this.state));
      const { state, toSend } = flushQueue(this.state);
      this.update(state);
      for (const cmd of toSend) {
        socket.send(encodeCommand(cmd));
      }
    };
    socket.onmessage = (event) => {
      this.update(onMessage(this.state, String(event.data)));
    };
    socket.onclose = () => {
      this.update(onClose(this.state));
      this.socket = null;
      if (!this.closedByUser) {
        this.reconnectTimer = setTimeout(() => this.connect(), this.reconnectDelayMs);
      }
    };
  }

  send(cmd: Command): void {
    const { state, send } = submitCommand(this.state, cmd);
    this.update(state);
    if (send && this.socket) {
      this.socket.send(encodeCommand(send));
    }
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer) {
      clearTimeout(this.reconnectTimer);
      this.reconnectTimer = null;
    }
    this.socket?.close();
  }
}
