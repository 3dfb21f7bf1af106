// Wiring: a session snapshot in, DOM out, user events back to the service.
// Every move waits for server confirmation (no optimistic state), and no
// move is submitted unless the server listed it as legal.

import { ApiError, Client } from "./api.js";
import { isLegal } from "./layout.js";
import { renderApp } from "./render.js";
import type { Move, SessionDoc } from "./types.js";

export class App {
  private session: SessionDoc | null = null;

  constructor(
    private client: Client,
    private root: HTMLElement,
    private picker: HTMLElement,
    private errors: HTMLElement,
  ) {}

  async start(): Promise<void> {
    const { boards } = await this.client.library();
    this.picker.innerHTML =
      boards
        .map(
          (b) =>
            `<button data-board="${b.id}" data-side="spoiler">${b.title} (play spoiler)</button>` +
            `<button data-board="${b.id}" data-side="duplicator">${b.title} (play duplicator)</button>`,
        )
        .join("") || "<p>no boards</p>";
    this.picker.addEventListener("click", (ev) => {
      const el = (ev.target as HTMLElement).closest("button[data-board]");
      if (!el) return;
      void this.newSession(
        el.getAttribute("data-board")!,
        el.getAttribute("data-side") as "spoiler" | "duplicator",
      );
    });
    this.root.addEventListener("click", (ev) => this.onClick(ev));
  }

  private async newSession(board: string, side: "spoiler" | "duplicator"): Promise<void> {
    await this.guard(async () => {
      this.session = await this.client.createSession(board, side);
      this.paint();
    });
  }

  private onClick(ev: Event): void {
    const target = ev.target as HTMLElement;
    const nodeEl = target.closest("g[data-element]");
    if (nodeEl && this.session) {
      const move: Move = {
        type: "pick",
        element: Number(nodeEl.getAttribute("data-element")),
      };
      if (isLegal(this.session, move)) void this.play(move);
      return;
    }
    const moveEl = target.closest("button[data-move]");
    if (moveEl && this.session) {
      const move = JSON.parse(moveEl.getAttribute("data-move")!) as Move;
      if (isLegal(this.session, move)) void this.play(move);
      return;
    }
    const actionEl = target.closest("button[data-action]");
    if (actionEl && this.session) {
      const action = actionEl.getAttribute("data-action");
      if (action === "undo") void this.guard(async () => {
        this.session = await this.client.undo(this.session!.id);
        this.paint();
      });
      if (action === "engine") void this.engineTurn();
    }
  }

  private async play(move: Move): Promise<void> {
    await this.guard(async () => {
      this.session = await this.client.move(this.session!.id, move);
      this.paint();
      await this.engineTurnIfDue();
    });
  }

  private async engineTurnIfDue(): Promise<void> {
    const s = this.session;
    if (s && !s.winner && s.to_move !== s.human_side) {
      await this.engineTurn();
    }
  }

  private async engineTurn(): Promise<void> {
    await this.guard(async () => {
      this.session = await this.client.engineMove(this.session!.id);
      this.paint();
      await this.engineTurnIfDue();
    });
  }

  private async guard(body: () => Promise<void>): Promise<void> {
    try {
      this.errors.textContent = "";
      await body();
    } catch (e) {
      this.errors.textContent =
        e instanceof ApiError ? `${e.status}: ${e.message}` : String(e);
    }
  }

  paint(): void {
    if (this.session) this.root.innerHTML = renderApp(this.session);
  }
}

export function boot(): void {
  const client = new Client("");
  const app = new App(
    client,
    document.getElementById("game")!,
    document.getElementById("library")!,
    document.getElementById("errors")!,
  );
  void app.start();
}
