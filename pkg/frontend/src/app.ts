/** DOM wiring: render the queue, bind the keyboard, surface errors.
 *
 * Keys: space/p play, a accept, r reject, e edit, Enter submit edit,
 * Esc cancel edit, j/k or arrows move, n/b page forward/back.
 */

import type { QueueState } from "./state.js";
import type { Player } from "./player.js";
import type { ReviewItem } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function zBadge(z: number | null): HTMLElement {
  const value = z ?? 0;
  const badge = el("span", "badge", `z ${value.toFixed(2)}`);
  badge.classList.add(Math.abs(value) > 4 ? "bad" : Math.abs(value) > 2.5 ? "warn" : "ok");
  badge.title = "speaking-rate robust z-score";
  return badge;
}

export class App {
  private editing = false;

  constructor(
    private readonly root: HTMLElement,
    private readonly state: QueueState,
    private readonly player: Player,
  ) {
    state.subscribe(() => this.render());
    document.addEventListener("keydown", (event) => this.onKey(event));
  }

  async start(): Promise<void> {
    await this.state.loadPage(0);
  }

  private onKey(event: KeyboardEvent): void {
    const target = event.target as HTMLElement | null;
    const typing = target?.tagName === "TEXTAREA" || target?.tagName === "INPUT";
    if (typing) {
      if (event.key === "Enter" && !event.shiftKey) {
        event.preventDefault();
        void this.submitEdit();
      } else if (event.key === "Escape") {
        this.cancelEdit();
      }
      return;
    }
    const item = this.state.current();
    switch (event.key) {
      case " ":
      case "p":
        event.preventDefault();
        if (item) void this.player.play(item.id);
        break;
      case "a":
        void this.state.decide("accept");
        break;
      case "r":
        void this.state.decide("reject");
        break;
      case "e":
        this.beginEdit();
        break;
      case "j":
      case "ArrowDown":
        this.state.moveCursor(1);
        break;
      case "k":
      case "ArrowUp":
        this.state.moveCursor(-1);
        break;
      case "n":
        void this.state.nextPage();
        break;
      case "b":
        void this.state.prevPage();
        break;
    }
  }

  private beginEdit(): void {
    const item = this.state.current();
    if (!item) return;
    this.editing = true;
    this.state.setEditBuffer(this.state.editBuffer ?? item.text_normalized);
  }

  private cancelEdit(): void {
    this.editing = false;
    this.state.setEditBuffer(null);
  }

  private async submitEdit(): Promise<void> {
    const text = this.state.editBuffer ?? "";
    if (!text.trim()) return; // submit stays blocked client-side
    const ok = await this.state.decide("edit_text", text);
    if (ok) this.editing = false;
  }

  private render(): void {
    const s = this.state;
    this.root.replaceChildren();

    if (s.connectionLost) {
      const banner = el("div", "banner error-banner");
      banner.append(
        el("p", undefined, `server unreachable: ${s.error ?? "unknown error"}`),
      );
      const retry = el("button", undefined, "retry");
      retry.onclick = () => void s.loadPage();
      banner.append(retry);
      this.root.append(banner);
      return;
    }

    const header = el("header");
    header.append(el("h1", undefined, "review queue"));
    header.append(
      el("span", "meta",
        `${s.total} waiting · page ${Math.floor(s.offset / s.limit) + 1}` +
        ` of ${Math.max(1, Math.ceil(s.total / s.limit))} · ${s.decided} decided`),
    );
    this.root.append(header);

    if (s.error && !s.connectionLost) {
      this.root.append(el("div", "banner inline-error", s.error));
    }

    if (s.items.length === 0 && !s.loading) {
      this.root.append(el("p", "empty", "nothing to review"));
      return;
    }

    const list = el("ul", "queue");
    s.items.forEach((item, index) => {
      list.append(this.renderItem(item, index === s.cursor));
    });
    this.root.append(list);

    const nav = el("nav");
    const back = el("button", undefined, "← prev page (b)");
    back.disabled = s.offset === 0;
    back.onclick = () => void s.prevPage();
    const fwd = el("button", undefined, "next page (n) →");
    fwd.disabled = s.offset + s.limit >= s.total;
    fwd.onclick = () => void s.nextPage();
    nav.append(back, fwd);
    this.root.append(nav);

    this.root.append(
      el("p", "help",
        "space: play · a: accept · r: reject · e: edit · j/k: move"),
    );
  }

  private renderItem(item: ReviewItem, selected: boolean): HTMLElement {
    const s = this.state;
    const li = el("li", selected ? "item selected" : "item");

    const row = el("div", "row");
    row.append(el("code", "id", item.id));
    row.append(zBadge(item.consistency_z));
    if (item.duration_s != null) {
      row.append(el("span", "meta", `${item.duration_s.toFixed(2)} s`));
    }
    li.append(row);

    if (selected && this.editing) {
      const box = el("textarea", "transcript-edit");
      box.value = s.editBuffer ?? item.text_normalized;
      box.oninput = () => {
        s.editBuffer = box.value; // no notify: keep focus while typing
      };
      li.append(box);
      const submit = el("button", undefined, "save + accept (Enter)");
      submit.disabled = !s.canDecide(item.id);
      submit.onclick = () => void this.submitEdit();
      const cancel = el("button", undefined, "cancel (Esc)");
      cancel.onclick = () => this.cancelEdit();
      li.append(submit, cancel);
    } else {
      li.append(el("p", "transcript", item.text_normalized));
    }

    if (selected) {
      const controls = el("div", "controls");
      const play = el("button", undefined,
        s.hasPlayed(item.id) ? "replay (space)" : "play (space)");
      play.onclick = () => void this.player.play(item.id);
      controls.append(play);

      const gate = !s.canDecide(item.id);
      const accept = el("button", "accept", "accept (a)");
      accept.disabled = gate;
      accept.onclick = () => void s.decide("accept");
      const reject = el("button", "reject", "reject (r)");
      reject.disabled = gate;
      reject.onclick = () => void s.decide("reject");
      const edit = el("button", undefined, "edit (e)");
      edit.onclick = () => this.beginEdit();
      controls.append(accept, reject, edit);
      if (gate && !s.hasPlayed(item.id)) {
        controls.append(el("span", "meta", "listen first"));
      }
      li.append(controls);
    }
    return li;
  }
}
