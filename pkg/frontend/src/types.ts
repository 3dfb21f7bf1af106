// Wire types mirrored from the qslab HTTP service.

export interface StructureDoc {
  signature: { relations: [string, number][]; constants: string[] };
  size: number;
  relations: Record<string, number[][]>;
  constants: Record<string, number>;
  labels: string[];
  order?: string;
}

export interface ForestNodes {
  labels: string[];
  children: number[][];
  roots: number[];
}

export type Move =
  | { type: "choose-tree"; tree: number }
  | { type: "pick"; element: number }
  | { type: "move-token"; child: number };

export interface SessionDoc {
  id: string;
  phase: "choose-tree" | "spoiler-pick" | "duplicator-pick" | "move-token" | "done";
  token: number | null;
  picks: [number, number][];
  winner: "spoiler" | "duplicator" | null;
  loss_reason: string | null;
  human_side: "spoiler" | "duplicator";
  to_move: "spoiler" | "duplicator" | null;
  legal_moves: Move[];
  can_undo: boolean;
  forest: string;
  forest_nodes: ForestNodes;
  a: StructureDoc;
  b: StructureDoc;
  engine_move?: Move;
}

export interface LibraryBoard {
  id: string;
  title: string;
  forest: string;
  a: string;
  b: string;
  a_structure: StructureDoc;
  b_structure: StructureDoc;
}
