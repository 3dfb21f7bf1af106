// Pure helpers turning structure documents into drawable geometry.
// Colored-tree structures (R/B relations with a root constant) get a layered
// top-down tree layout; bare digraphs fall back to a circle.

import type { Move, SessionDoc, StructureDoc } from "./types.js";

export interface Arc {
  from: number;
  to: number;
  color: "red" | "blue" | "plain";
  loop: boolean;
}

export interface NodeGeom {
  id: number;
  x: number;
  y: number;
  marked: boolean;
  junction: boolean;
  root: boolean;
  label: string;
  rank: number | null;
}

export interface Geometry {
  width: number;
  height: number;
  nodes: NodeGeom[];
  arcs: Arc[];
}

const X_STEP = 34;
const Y_STEP = 78;
const MARGIN = 26;

function markedSet(doc: StructureDoc): Set<number> {
  return new Set((doc.relations["U"] ?? []).map((t) => t[0]));
}

function orderRanks(doc: StructureDoc): (number | null)[] {
  if (!doc.order) return Array.from({ length: doc.size }, () => null);
  const pairs = new Set((doc.relations[doc.order] ?? []).map(([x, y]) => `${x},${y}`));
  return Array.from({ length: doc.size }, (_, x) => {
    let below = 0;
    for (let z = 0; z < doc.size; z++) if (pairs.has(`${z},${x}`)) below++;
    return below - 1;
  });
}

export function structureGeometry(doc: StructureDoc): Geometry {
  const marked = markedSet(doc);
  const ranks = orderRanks(doc);
  const junction = (v: number) => (doc.labels[v] ?? "").includes("junction");
  const rootConst = doc.constants["r"];

  if ("R" in doc.relations || "B" in doc.relations) {
    const father = new Map<number, { f: number; color: "red" | "blue" }>();
    for (const [f, c] of doc.relations["R"] ?? []) father.set(c, { f, color: "red" });
    for (const [f, c] of doc.relations["B"] ?? []) father.set(c, { f, color: "blue" });
    const depth = (v: number): number => {
      let d = 0;
      let cur = v;
      while (father.has(cur)) {
        cur = father.get(cur)!.f;
        d++;
      }
      return d;
    };
    const depths = Array.from({ length: doc.size }, (_, v) => depth(v));
    const perDepth = new Map<number, number[]>();
    depths.forEach((d, v) => {
      if (!perDepth.has(d)) perDepth.set(d, []);
      perDepth.get(d)!.push(v);
    });
    const widest = Math.max(...[...perDepth.values()].map((vs) => vs.length));
    const width = MARGIN * 2 + Math.max(1, widest - 1) * X_STEP;
    const pos = new Map<number, { x: number; y: number }>();
    for (const [d, vs] of perDepth) {
      vs.sort((a, b) => (ranks[a] ?? a)! - (ranks[b] ?? b)!);
      vs.forEach((v, i) => {
        const span = (vs.length - 1) * X_STEP;
        pos.set(v, { x: width / 2 - span / 2 + i * X_STEP, y: MARGIN + d * Y_STEP });
      });
    }
    const arcs: Arc[] = [];
    for (const [f, c] of doc.relations["R"] ?? [])
      arcs.push({ from: f, to: c, color: "red", loop: f === c });
    for (const [f, c] of doc.relations["B"] ?? [])
      arcs.push({ from: f, to: c, color: "blue", loop: f === c });
    return {
      width,
      height: MARGIN * 2 + Math.max(...depths) * Y_STEP,
      nodes: Array.from({ length: doc.size }, (_, v) => ({
        id: v,
        ...pos.get(v)!,
        marked: marked.has(v),
        junction: junction(v),
        root: v === rootConst,
        label: doc.labels[v] ?? String(v),
        rank: ranks[v],
      })),
      arcs,
    };
  }

  // plain digraph: a circle with forward arcs
  const n = doc.size;
  const radius = Math.max(60, (n * X_STEP) / (2 * Math.PI));
  const size = radius * 2 + MARGIN * 2;
  const nodes = Array.from({ length: n }, (_, v) => {
    const angle = (2 * Math.PI * v) / n - Math.PI / 2;
    return {
      id: v,
      x: size / 2 + radius * Math.cos(angle),
      y: size / 2 + radius * Math.sin(angle),
      marked: marked.has(v),
      junction: junction(v),
      root: v === rootConst,
      label: doc.labels[v] ?? String(v),
      rank: ranks[v],
    };
  });
  const arcs: Arc[] = (doc.relations["E"] ?? []).map(([x, y]) => ({
    from: x,
    to: y,
    color: "plain" as const,
    loop: x === y,
  }));
  return { width: size, height: size, nodes, arcs };
}

// -- snapshot helpers ---------------------------------------------------------

export function isLegal(doc: SessionDoc, move: Move): boolean {
  return doc.legal_moves.some((m) => JSON.stringify(m) === JSON.stringify(move));
}

export function pickTarget(doc: SessionDoc): "a" | "b" | null {
  if (doc.token === null) return null;
  const existsNode = doc.forest_nodes.labels[doc.token] === "E";
  if (doc.phase === "spoiler-pick") return existsNode ? "a" : "b";
  if (doc.phase === "duplicator-pick") return existsNode ? "b" : "a";
  return null;
}

export function legalElements(doc: SessionDoc): Set<number> {
  const out = new Set<number>();
  for (const m of doc.legal_moves) if (m.type === "pick") out.add(m.element);
  return out;
}
