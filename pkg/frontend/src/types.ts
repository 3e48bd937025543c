// Payload shapes of the antwatch service (API version 1).

export type Tag = "ant" | "entity" | "other";
export type ZoneLabel = "larva" | "ant" | "unknown";
export type Variant = "regular" | "extruded";
export type CorrectionAction = "prune" | "boost";

export interface SessionInfo {
  version: number;
  session_id: string;
  cursor: number;
  frames: number;
  trained: boolean;
  digest: string;
  corrections?: CorrectionEntry[];
  tree_stale?: boolean;
}

export interface Zone {
  zone_id: number;
  cells: [number, number][];
  centroid: [number, number];
  label: ZoneLabel;
  source: string;
}

export interface TrackPoint {
  track: number;
  x: number;
  y: number;
  interpolated: boolean;
}

export interface PredictedState {
  x: number;
  y: number;
  p: number;
  tag: Tag;
}

export interface PredictionPayload {
  version?: number;
  ant: number;
  frame: number;
  states: PredictedState[];
}

export interface OverlayPayload {
  version: number;
  frame: number;
  zones: Zone[];
  tracks: TrackPoint[];
  prediction: PredictionPayload | null;
}

export interface TreeNode {
  id: number;
  parent: number | null;
  x: number;
  y: number;
  move: string;
  p: number;
  tag: Tag;
  depth: number;
}

export interface WalkPayload {
  version: number;
  threshold: number;
  requested_threshold: number;
  mode: "system" | "user";
  nodes: TreeNode[];
}

// One line of the server-side correction log.  `path` lists the
// (x, y, move) states from the tree root to the corrected node.
export interface CorrectionEntry {
  serial: number;
  action: CorrectionAction;
  factor: number | null;
  path: [number, number, string][];
  noop: boolean;
}

export interface CorrectionResult {
  version: number;
  digest: string;
  noop: boolean;
  correction: CorrectionEntry;
  row: { x: number; y: number; move: string; p: number }[];
}

export interface ErrorPayload {
  version: number;
  error: string;
  detail: string;
}

export interface WalkRequest {
  x: number;
  y: number;
  mode?: "system" | "user";
  depth?: number;
  threshold?: number;
}

export interface CorrectionRequest {
  node_id: number;
  action: CorrectionAction;
  factor?: number;
  persist?: boolean;
}
