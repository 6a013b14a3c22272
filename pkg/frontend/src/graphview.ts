import { nodeColor } from "./color";
import { computeLayout, type LayoutPoint } from "./layout";
import type { Band, ChangedNode, GraphView, ViewNode } from "./schema";

export interface SceneNode {
  id: string;
  x: number;
  y: number;
  radius: number;
  color: string;
  band: Band;
  label: string;
  showLabel: boolean;
  selected: boolean;
  pulse: number; // 0..1 recolor animation progress, 1 = settled
}

export interface SceneEdge {
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  width: number;
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
  labelsVisible: boolean;
}

const LABEL_NODE_LIMIT = 1500;
const LABEL_ZOOM_THRESHOLD = 1.6;
const PULSE_MS = 600;

interface NodeState {
  data: ViewNode;
  pulseStart: number | null;
}

/**
 * Holds graph data, the deterministic layout, the pan/zoom transform, and
 * the recolor animation state. Pure geometry: rendering to a canvas happens
 * in the caller, so everything here is unit-testable.
 */
export class GraphViewModel {
  private nodes = new Map<string, NodeState>();
  private edges: { a: string; b: string; weight: number }[] = [];
  private layout = new Map<string, LayoutPoint>();
  private scale = 1;
  private tx = 0;
  private ty = 0;

  setData(view: GraphView): void {
    this.nodes.clear();
    for (const node of view.nodes) {
      this.nodes.set(node.id, { data: node, pulseStart: null });
    }
    this.edges = view.edges.map((e) => ({ a: e.a, b: e.b, weight: e.weight }));
    // seeded by the book so the layout is identical across reloads
    this.layout = computeLayout(
      view.nodes.map((n) => n.id),
      this.edges,
      `${view.book_id}:${view.nodes.length}`,
    );
  }

  /** Apply a testing answer's changed-node list; starts recolor pulses. */
  applyChanges(changed: ChangedNode[], now: number): void {
    for (const change of changed) {
      const state = this.nodes.get(change.family);
      if (!state) continue;
      state.data = { ...state.data, mastery: change.new, band: change.band };
      state.pulseStart = now;
    }
  }

  /** Mark a node's expansion payload (members arrive from the server). */
  setExpanded(node: ViewNode): void {
    const state = this.nodes.get(node.id);
    if (state) {
      state.data = node;
    }
  }

  pan(dx: number, dy: number): void {
    this.tx += dx;
    this.ty += dy;
  }

  zoomAt(x: number, y: number, factor: number): void {
    const next = Math.max(0.1, Math.min(12, this.scale * factor));
    const applied = next / this.scale;
    this.tx = x - (x - this.tx) * applied;
    this.ty = y - (y - this.ty) * applied;
    this.scale = next;
  }

  get transform(): { scale: number; tx: number; ty: number } {
    return { scale: this.scale, tx: this.tx, ty: this.ty };
  }

  toScreen(p: LayoutPoint): { x: number; y: number } {
    return { x: p.x * this.scale + this.tx, y: p.y * this.scale + this.ty };
  }

  /** Node id under a screen point, or null; used for expansion clicks. */
  hitTest(x: number, y: number): string | null {
    let best: string | null = null;
    let bestD2 = Infinity;
    for (const [id, state] of this.nodes) {
      const p = this.layout.get(id);
      if (!p) continue;
      const s = this.toScreen(p);
      const r = this.nodeRadius(state.data) * this.scale + 3;
      const d2 = (s.x - x) ** 2 + (s.y - y) ** 2;
      if (d2 <= r * r && d2 < bestD2) {
        best = id;
        bestD2 = d2;
      }
    }
    return best;
  }

  private nodeRadius(node: ViewNode): number {
    return node.selected ? 9 : 5;
  }

  /** Everything the canvas needs this frame; `now` drives pulse animation. */
  scene(now: number): Scene {
    const labelsVisible =
      this.nodes.size <= LABEL_NODE_LIMIT || this.scale >= LABEL_ZOOM_THRESHOLD;
    const nodes: SceneNode[] = [];
    for (const [id, state] of this.nodes) {
      const p = this.layout.get(id);
      if (!p) continue;
      const s = this.toScreen(p);
      let pulse = 1;
      if (state.pulseStart !== null) {
        pulse = Math.min(1, (now - state.pulseStart) / PULSE_MS);
        if (pulse >= 1) {
          state.pulseStart = null;
        }
      }
      nodes.push({
        id,
        x: s.x,
        y: s.y,
        radius: this.nodeRadius(state.data) * this.scale * (1 + 0.8 * (1 - pulse)),
        color: nodeColor(state.data.band, state.data.mastery),
        band: state.data.band,
        label: state.data.label,
        showLabel: labelsVisible,
        selected: state.data.selected,
        pulse,
      });
    }
    const edges: SceneEdge[] = [];
    for (const edge of this.edges) {
      const pa = this.layout.get(edge.a);
      const pb = this.layout.get(edge.b);
      if (!pa || !pb) continue;
      const sa = this.toScreen(pa);
      const sb = this.toScreen(pb);
      edges.push({ x1: sa.x, y1: sa.y, x2: sb.x, y2: sb.y, width: 0.4 + edge.weight });
    }
    return { nodes, edges, labelsVisible };
  }

  get animating(): boolean {
    for (const state of this.nodes.values()) {
      if (state.pulseStart !== null) return true;
    }
    return false;
  }

  node(id: string): ViewNode | undefined {
    return this.nodes.get(id)?.data;
  }
}

/** Canvas binding: draws a scene and forwards pointer gestures. */
export function drawScene(ctx: CanvasRenderingContext2D, scene: Scene, width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  ctx.lineCap = "round";
  ctx.strokeStyle = "rgba(120, 130, 140, 0.25)";
  for (const edge of scene.edges) {
    ctx.lineWidth = edge.width;
    ctx.beginPath();
    ctx.moveTo(edge.x1, edge.y1);
    ctx.lineTo(edge.x2, edge.y2);
    ctx.stroke();
  }
  ctx.textAlign = "center";
  ctx.font = "11px system-ui, sans-serif";
  for (const node of scene.nodes) {
    ctx.beginPath();
    ctx.fillStyle = node.color;
    ctx.arc(node.x, node.y, node.radius, 0, Math.PI * 2);
    ctx.fill();
    if (node.selected) {
      ctx.lineWidth = 2;
      ctx.strokeStyle = "#2b6cb0";
      ctx.stroke();
    }
    if (node.showLabel) {
      ctx.fillStyle = "#333";
      ctx.fillText(node.label, node.x, node.y - node.radius - 3);
    }
  }
}
