import { describe, expect, it } from "vitest";

import { GraphViewModel } from "../src/graphview";
import { computeLayout } from "../src/layout";
import { mulberry32 } from "../src/rng";
import type { GraphView, ViewEdge, ViewNode } from "../src/schema";

function syntheticView(nodeCount: number, edgeCount: number): GraphView {
  const rng = mulberry32(42);
  const nodes: ViewNode[] = [];
  for (let i = 0; i < nodeCount; i++) {
    nodes.push({
      id: `n${i}`,
      label: `word${i}`,
      mastery: 0.5,
      band: "grey",
      selected: i < 20,
    });
  }
  const edges: ViewEdge[] = [];
  const seen = new Set<string>();
  while (edges.length < edgeCount) {
    const a = Math.floor(rng() * nodeCount);
    const b = Math.floor(rng() * nodeCount);
    if (a === b) continue;
    const key = `${Math.min(a, b)}-${Math.max(a, b)}`;
    if (seen.has(key)) continue;
    seen.add(key);
    edges.push({ a: `n${Math.min(a, b)}`, b: `n${Math.max(a, b)}`, weight: 0.3 + rng() * 0.7 });
  }
  return { learner_id: "l", book_id: "bench", nodes, edges, changed: [] };
}

describe("layout", () => {
  it("is deterministic for a given seed key", () => {
    const ids = Array.from({ length: 60 }, (_, i) => `n${i}`);
    const edges = ids.slice(1).map((id, i) => ({ a: ids[i], b: id, weight: 0.5 }));
    const first = computeLayout(ids, edges, "book-a");
    const second = computeLayout(ids, edges, "book-a");
    for (const id of ids) {
      expect(first.get(id)).toEqual(second.get(id));
    }
    const other = computeLayout(ids, edges, "book-b");
    expect(ids.some((id) => first.get(id)!.x !== other.get(id)!.x)).toBe(true);
  });

  it("separates nodes instead of collapsing them", () => {
    const ids = Array.from({ length: 40 }, (_, i) => `n${i}`);
    const layout = computeLayout(ids, [], "spread");
    let minD2 = Infinity;
    for (let i = 0; i < ids.length; i++) {
      for (let j = i + 1; j < ids.length; j++) {
        const a = layout.get(ids[i])!;
        const b = layout.get(ids[j])!;
        minD2 = Math.min(minD2, (a.x - b.x) ** 2 + (a.y - b.y) ** 2);
      }
    }
    expect(Math.sqrt(minD2)).toBeGreaterThan(4);
  });

  it("stays interactive at book scale (1.3k nodes)", () => {
    const view = syntheticView(1300, 3250);
    const model = new GraphViewModel();

    const layoutStart = performance.now();
    model.setData(view);
    const layoutMs = performance.now() - layoutStart;
    expect(layoutMs).toBeLessThan(5000); // one-time cost at load

    // steady-state frame work: pan + zoom + scene rebuild + a hit test
    const frames = 30;
    const frameStart = performance.now();
    for (let f = 0; f < frames; f++) {
      model.pan(2, 1);
      model.zoomAt(400, 300, f % 2 === 0 ? 1.05 : 1 / 1.05);
      const scene = model.scene(frameStart + f * 16);
      expect(scene.nodes.length).toBe(1300);
      model.hitTest(400, 300);
    }
    const perFrame = (performance.now() - frameStart) / frames;
    expect(perFrame).toBeLessThan(16); // 60 fps budget on the math side
  });

  it("hides labels on big graphs until zoomed in", () => {
    const big = syntheticView(1600, 1000);
    const model = new GraphViewModel();
    model.setData(big);
    expect(model.scene(0).labelsVisible).toBe(false);
    model.zoomAt(0, 0, 2.0);
    expect(model.scene(0).labelsVisible).toBe(true);

    const small = syntheticView(200, 100);
    const smallModel = new GraphViewModel();
    smallModel.setData(small);
    expect(smallModel.scene(0).labelsVisible).toBe(true);
  });

  it("hit-tests nodes under the pointer", () => {
    const view = syntheticView(30, 20);
    const model = new GraphViewModel();
    model.setData(view);
    const scene = model.scene(0);
    const target = scene.nodes[7];
    expect(model.hitTest(target.x, target.y)).toBe(target.id);
    expect(model.hitTest(target.x + 5000, target.y)).toBeNull();
  });
});
