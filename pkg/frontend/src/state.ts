/** Review session state: the queue page, playback gating, and optimistic
 * decisions with rollback.
 *
 * Rules enforced here rather than in the DOM layer so they are testable:
 *   - no decision is submitted before audio playback of that item started;
 *   - edit submissions need non-empty text;
 *   - at most one decision request is in flight;
 *   - a failed decision restores the item and keeps the edit buffer;
 *   - a not_reviewable conflict refreshes the item from the server;
 *   - stale queue fetches never clobber newer ones.
 */

import { ApiError, type ReviewApi } from "./api.js";
import type { DecisionAction, ReviewItem } from "./types.js";

export type Listener = () => void;

export interface QueueStateSnapshot {
  items: ReviewItem[];
  total: number;
  offset: number;
  limit: number;
  cursor: number;
  inflight: boolean;
  loading: boolean;
  error: string | null;
  connectionLost: boolean;
  editBuffer: string | null;
  decided: number;
}

export class QueueState {
  items: ReviewItem[] = [];
  total = 0;
  offset = 0;
  limit = 10;
  cursor = 0;
  inflight = false;
  loading = false;
  error: string | null = null;
  connectionLost = false;
  editBuffer: string | null = null;
  decided = 0;
  reviewer = "reviewer";

  private played = new Set<string>();
  private fetchEpoch = 0;
  private listeners: Listener[] = [];

  constructor(private readonly api: ReviewApi) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  snapshot(): QueueStateSnapshot {
    return {
      items: [...this.items],
      total: this.total,
      offset: this.offset,
      limit: this.limit,
      cursor: this.cursor,
      inflight: this.inflight,
      loading: this.loading,
      error: this.error,
      connectionLost: this.connectionLost,
      editBuffer: this.editBuffer,
      decided: this.decided,
    };
  }

  current(): ReviewItem | null {
    return this.items[this.cursor] ?? null;
  }

  /** Load one queue page; stale responses are discarded. */
  async loadPage(offset: number = this.offset): Promise<void> {
    const epoch = ++this.fetchEpoch;
    this.loading = true;
    this.notify();
    try {
      const page = await this.api.fetchQueue(offset, this.limit);
      if (epoch !== this.fetchEpoch) return; // a newer load superseded us
      this.items = page.items;
      this.total = page.total;
      this.offset = page.offset;
      this.cursor = Math.min(this.cursor, Math.max(0, this.items.length - 1));
      this.connectionLost = false;
      this.error = null;
    } catch (err) {
      if (epoch !== this.fetchEpoch) return;
      this.connectionLost = true;
      this.error = err instanceof Error ? err.message : String(err);
    } finally {
      if (epoch === this.fetchEpoch) {
        this.loading = false;
        this.notify();
      }
    }
  }

  async nextPage(): Promise<void> {
    if (this.offset + this.limit < this.total) {
      this.cursor = 0;
      await this.loadPage(this.offset + this.limit);
    }
  }

  async prevPage(): Promise<void> {
    if (this.offset > 0) {
      this.cursor = 0;
      await this.loadPage(Math.max(0, this.offset - this.limit));
    }
  }

  select(index: number): void {
    if (index >= 0 && index < this.items.length) {
      this.cursor = index;
      this.editBuffer = null;
      this.notify();
    }
  }

  moveCursor(delta: number): void {
    this.select(this.cursor + delta);
  }

  /** The player reports that playback of an item has started. */
  markPlaybackStarted(id: string): void {
    this.played.add(id);
    this.notify();
  }

  hasPlayed(id: string): boolean {
    return this.played.has(id);
  }

  /** Submit is enabled only after playback started and while idle. */
  canDecide(id: string): boolean {
    return this.played.has(id) && !this.inflight;
  }

  setEditBuffer(text: string | null): void {
    this.editBuffer = text;
    this.notify();
  }

  /**
   * Decide the current item: optimistic removal, rollback on failure.
   * Returns true when the decision was accepted by the server.
   */
  async decide(action: DecisionAction, editedText?: string): Promise<boolean> {
    const item = this.current();
    if (!item || this.inflight) return false;
    if (!this.played.has(item.id)) {
      this.error = "listen to the clip before deciding";
      this.notify();
      return false;
    }
    if (action === "edit_text" && !(editedText ?? "").trim()) {
      this.error = "edited text must be non-empty";
      this.notify();
      return false;
    }

    const index = this.cursor;
    const snapshotItems = [...this.items];
    const snapshotTotal = this.total;

    // optimistic update: drop the item, keep the cursor position
    this.items = this.items.filter((_, i) => i !== index);
    this.total -= 1;
    this.cursor = Math.min(index, Math.max(0, this.items.length - 1));
    this.inflight = true;
    this.error = null;
    this.notify();

    try {
      await this.api.postDecision({
        record_id: item.id,
        action,
        edited_text: editedText,
        reviewer: this.reviewer,
      });
      this.decided += 1;
      this.editBuffer = null;
      return true;
    } catch (err) {
      // rollback; the edit buffer survives so nothing typed is lost
      this.items = snapshotItems;
      this.total = snapshotTotal;
      this.cursor = index;
      if (err instanceof ApiError && err.category === "not_reviewable") {
        await this.refreshItem(item.id);
        this.error = `already ${this.items[index]?.status ?? "decided elsewhere"}`;
      } else {
        this.error = err instanceof Error ? err.message : String(err);
      }
      return false;
    } finally {
      this.inflight = false;
      this.notify();
    }
  }

  /** Re-fetch one item after a conflict; drop it if no longer reviewable. */
  async refreshItem(id: string): Promise<void> {
    try {
      const fresh = await this.api.fetchRecord(id);
      if (fresh.status === "needs_review") {
        this.items = this.items.map((it) => (it.id === id ? fresh : it));
      } else {
        this.items = this.items.filter((it) => it.id !== id);
        this.total = Math.max(0, this.total - 1);
      }
    } catch {
      this.items = this.items.filter((it) => it.id !== id);
      this.total = Math.max(0, this.total - 1);
    }
    this.cursor = Math.min(this.cursor, Math.max(0, this.items.length - 1));
    this.notify();
  }
}
