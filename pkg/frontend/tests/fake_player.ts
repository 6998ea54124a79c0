import type { AudioLike } from "../src/player.js";

/** Minimal HTMLAudioElement stand-in that fires its 'play' listeners. */
export class FakeAudio implements AudioLike {
  src = "";
  currentTime = 0;
  playCalls = 0;
  private listeners = new Map<string, Array<() => void>>();

  addEventListener(type: string, listener: () => void): void {
    const list = this.listeners.get(type) ?? [];
    list.push(listener);
    this.listeners.set(type, list);
  }

  async play(): Promise<void> {
    this.playCalls += 1;
    for (const listener of this.listeners.get("play") ?? []) listener();
  }

  pause(): void {}
}
