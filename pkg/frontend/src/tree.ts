// View model for walk trees: depth layers for the collapsible panel
// and parent-link helpers for naming branches.

import type { TreeNode, WalkPayload } from "./types.js";

export interface TreeView {
  byId: Map<number, TreeNode>;
  byDepth: TreeNode[][];
  children: Map<number, TreeNode[]>;
  maxDepth: number;
}

export function buildTreeView(payload: WalkPayload): TreeView {
  const byId = new Map<number, TreeNode>();
  const children = new Map<number, TreeNode[]>();
  let maxDepth = 0;
  for (const node of payload.nodes) {
    byId.set(node.id, node);
    if (node.depth > maxDepth) maxDepth = node.depth;
    if (node.parent !== null) {
      const siblings = children.get(node.parent) ?? [];
      siblings.push(node);
      children.set(node.parent, siblings);
    }
  }
  const byDepth: TreeNode[][] = Array.from({ length: maxDepth + 1 }, () => []);
  for (const node of payload.nodes) byDepth[node.depth].push(node);
  return { byId, byDepth, children, maxDepth };
}

// Root-to-node chain following parent links.
export function pathToNode(view: TreeView, id: number): TreeNode[] {
  const path: TreeNode[] = [];
  let current = view.byId.get(id);
  if (!current) throw new Error(`no node ${id} in the current tree`);
  while (current) {
    path.push(current);
    current = current.parent === null ? undefined : view.byId.get(current.parent);
  }
  return path.reverse();
}

export function formatNode(node: TreeNode): string {
  return `#${node.id} (${node.x},${node.y} ${node.move}) p=${node.p.toFixed(4)} ${node.tag}`;
}

// The walk-tree panel shows one collapsible layer per depth; collapsed
// layers contribute a count line only.
export function layerLines(view: TreeView, depth: number, collapsed: boolean): string[] {
  const layer = view.byDepth[depth] ?? [];
  if (collapsed) return [`depth ${depth}: ${layer.length} nodes (collapsed)`];
  return layer.map(formatNode);
}

// True when the re-fetched tree no longer walks the given edge.  Used
// after a prune to confirm the branch really disappeared.
export function hasEdge(
  view: TreeView,
  from: { x: number; y: number; move: string },
  to: { x: number; y: number; move: string },
): boolean {
  for (const node of view.byId.values()) {
    if (node.parent === null) continue;
    const parent = view.byId.get(node.parent)!;
    if (
      parent.x === from.x && parent.y === from.y && parent.move === from.move &&
      node.x === to.x && node.y === to.y && node.move === to.move
    ) {
      return true;
    }
  }
  return false;
}
