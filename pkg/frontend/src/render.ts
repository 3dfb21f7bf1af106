// Rendering is a pure function of the last session snapshot: every view
// below maps a SessionDoc (plus nothing else) to markup.

import { legalElements, pickTarget, structureGeometry } from "./layout.js";
import type { SessionDoc, StructureDoc } from "./types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function arrow(x1: number, y1: number, x2: number, y2: number, cls: string): string {
  if (x1 === x2 && y1 === y2) {
    return `<path class="arc ${cls}" d="M ${x1 - 6} ${y1 - 8} a 9 9 0 1 1 12 0" fill="none" marker-end="url(#tip)"/>`;
  }
  const dx = x2 - x1;
  const dy = y2 - y1;
  const len = Math.hypot(dx, dy) || 1;
  const sx = x1 + (dx / len) * 10;
  const sy = y1 + (dy / len) * 10;
  const ex = x2 - (dx / len) * 12;
  const ey = y2 - (dy / len) * 12;
  return `<line class="arc ${cls}" x1="${sx}" y1="${sy}" x2="${ex}" y2="${ey}" marker-end="url(#tip)"/>`;
}

export function renderStructure(
  doc: StructureDoc,
  side: "a" | "b",
  session: SessionDoc,
): string {
  const geom = structureGeometry(doc);
  const picked = new Map<number, number>();
  session.picks.forEach(([a, b], i) => picked.set(side === "a" ? a : b, i + 1));
  const target = pickTarget(session) === side;
  const clickable = target ? legalElements(session) : new Set<number>();
  const parts: string[] = [];
  for (const arc of geom.arcs) {
    const from = geom.nodes[arc.from];
    const to = geom.nodes[arc.to];
    parts.push(arrow(from.x, from.y, to.x, to.y, arc.color));
  }
  for (const node of geom.nodes) {
    const cls = [
      "node",
      node.marked ? "marked" : "",
      node.junction ? "junction" : "",
      node.root ? "root" : "",
      picked.has(node.id) ? "picked" : "",
      clickable.has(node.id) ? "clickable" : "",
    ]
      .filter(Boolean)
      .join(" ");
    parts.push(
      `<g class="${cls}" data-side="${side}" data-element="${node.id}">` +
        `<circle cx="${node.x}" cy="${node.y}" r="9"><title>${esc(node.label)}</title></circle>` +
        (picked.has(node.id)
          ? `<text class="pick-index" x="${node.x}" y="${node.y + 4}">${picked.get(node.id)}</text>`
          : "") +
        (node.rank !== null
          ? `<text class="rank" x="${node.x}" y="${node.y + 22}">${node.rank}</text>`
          : "") +
        `</g>`,
    );
  }
  return (
    `<svg class="structure" viewBox="0 0 ${geom.width} ${geom.height}" ` +
    `width="${Math.min(640, geom.width)}">` +
    `<defs><marker id="tip" markerWidth="7" markerHeight="7" refX="6" refY="3.5" orient="auto">` +
    `<path d="M0,0 L7,3.5 L0,7 z"/></marker></defs>${parts.join("")}</svg>`
  );
}

export function renderForest(session: SessionDoc): string {
  const nodes = session.forest_nodes;
  const depth: number[] = nodes.labels.map(() => 0);
  const father: (number | null)[] = nodes.labels.map(() => null);
  nodes.children.forEach((kids, v) => kids.forEach((w) => (father[w] = v)));
  for (let v = 0; v < nodes.labels.length; v++) {
    let d = 0;
    let cur: number | null = v;
    while (father[cur!] !== null) {
      cur = father[cur!];
      d++;
    }
    depth[v] = d;
  }
  const perDepth = new Map<number, number[]>();
  depth.forEach((d, v) => {
    if (!perDepth.has(d)) perDepth.set(d, []);
    perDepth.get(d)!.push(v);
  });
  const widest = Math.max(...[...perDepth.values()].map((vs) => vs.length));
  const width = 40 + Math.max(1, widest - 1) * 42;
  const height = 40 + Math.max(...depth) * 52;
  const pos = new Map<number, { x: number; y: number }>();
  for (const [d, vs] of perDepth) {
    vs.forEach((v, i) => {
      const span = (vs.length - 1) * 42;
      pos.set(v, { x: width / 2 - span / 2 + i * 42, y: 22 + d * 52 });
    });
  }
  const parts: string[] = [];
  nodes.children.forEach((kids, v) =>
    kids.forEach((w) => {
      const a = pos.get(v)!;
      const b = pos.get(w)!;
      parts.push(`<line class="arc plain" x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}"/>`);
    }),
  );
  nodes.labels.forEach((label, v) => {
    const p = pos.get(v)!;
    const cls = ["forest-node", session.token === v ? "token" : ""].filter(Boolean).join(" ");
    parts.push(
      `<g class="${cls}" data-board-node="${v}">` +
        `<circle cx="${p.x}" cy="${p.y}" r="12"/>` +
        `<text x="${p.x}" y="${p.y + 4}">${label}</text></g>`,
    );
  });
  return `<svg class="forest" viewBox="0 0 ${width} ${height}" width="${Math.min(360, width)}">${parts.join("")}</svg>`;
}

export function renderPairs(session: SessionDoc): string {
  if (session.picks.length === 0) return "<p class=\"pairs-empty\">no rounds yet</p>";
  const rows = session.picks
    .map(
      ([a, b], i) =>
        `<tr><td>${i + 1}</td><td>${esc(session.a.labels[a] ?? String(a))}</td>` +
        `<td>${esc(session.b.labels[b] ?? String(b))}</td></tr>`,
    )
    .join("");
  return (
    `<table class="pairs"><thead><tr><th>round</th><th>left pick</th><th>right pick</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderStatus(session: SessionDoc): string {
  if (session.phase === "done") {
    const verdict =
      session.winner === session.human_side
        ? `you win as ${session.winner}`
        : `the engine wins as ${session.winner}`;
    const reason = session.loss_reason
      ? `<p class="violation">violated literal: <code>${esc(session.loss_reason)}</code></p>`
      : "";
    return `<div class="status done"><strong>${verdict}</strong>${reason}</div>`;
  }
  const who = session.to_move === session.human_side ? "your move" : "engine to move";
  return `<div class="status"><strong>${who}</strong> <span>(${session.phase}, ${session.to_move})</span></div>`;
}

export function renderControls(session: SessionDoc): string {
  const buttons: string[] = [];
  for (const move of session.legal_moves) {
    if (move.type === "choose-tree") {
      buttons.push(
        `<button data-move='${JSON.stringify(move)}'>start on tree ${move.tree}</button>`,
      );
    } else if (move.type === "move-token") {
      buttons.push(
        `<button data-move='${JSON.stringify(move)}'>move token to ${move.child}</button>`,
      );
    }
  }
  buttons.push(
    `<button data-action="undo" ${session.can_undo ? "" : "disabled"}>undo</button>`,
  );
  if (!session.winner && session.to_move !== session.human_side) {
    buttons.push(`<button data-action="engine">let the engine move</button>`);
  }
  return `<div class="controls">${buttons.join("")}</div>`;
}

export function renderApp(session: SessionDoc): string {
  return (
    renderStatus(session) +
    `<div class="boards">` +
    `<section><h3>game forest</h3>${renderForest(session)}</section>` +
    `<section><h3>left structure</h3>${renderStructure(session.a, "a", session)}</section>` +
    `<section><h3>right structure</h3>${renderStructure(session.b, "b", session)}</section>` +
    `</div>` +
    `<section><h3>pairing</h3>${renderPairs(session)}</section>` +
    renderControls(session)
  );
}
