// Thin typed client over the qslab service; every call returns the fresh
// session snapshot, which is the single source of truth for the UI.

import type { LibraryBoard, Move, SessionDoc } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class Client {
  constructor(private base: string) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.base + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    const body = await res.json().catch(() => ({}));
    if (!res.ok) {
      const detail =
        typeof body === "object" && body !== null && "detail" in body
          ? String((body as { detail: unknown }).detail)
          : res.statusText;
      throw new ApiError(res.status, detail);
    }
    return body as T;
  }

  library(): Promise<{ boards: LibraryBoard[] }> {
    return this.request("/library");
  }

  createSession(board: string, humanSide: "spoiler" | "duplicator"): Promise<SessionDoc> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ library: board, human_side: humanSide }),
    });
  }

  getSession(id: string): Promise<SessionDoc> {
    return this.request(`/sessions/${id}`);
  }

  move(id: string, move: Move): Promise<SessionDoc> {
    return this.request(`/sessions/${id}/move`, {
      method: "POST",
      body: JSON.stringify(move),
    });
  }

  engineMove(id: string): Promise<SessionDoc> {
    return this.request(`/sessions/${id}/engine-move`, { method: "POST" });
  }

  undo(id: string): Promise<SessionDoc> {
    return this.request(`/sessions/${id}/undo`, { method: "POST" });
  }
}
