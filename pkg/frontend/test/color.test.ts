import { describe, expect, it } from "vitest";

import { bandIntensity, nodeColor } from "../src/color";
import type { Band, GraphView } from "../src/schema";
import { loadRecording } from "./support/recorded";

function channels(color: string): [number, number, number] {
  const match = color.match(/^rgb\((\d+), (\d+), (\d+)\)$/);
  if (!match) throw new Error(`not an rgb() color: ${color}`);
  return [Number(match[1]), Number(match[2]), Number(match[3])];
}

describe("nodeColor", () => {
  it("renders grey and yellow as fixed band colors", () => {
    expect(nodeColor("grey", 0.5)).toBe(nodeColor("grey", 0.1));
    expect(nodeColor("yellow", 0.46)).toBe(nodeColor("yellow", 0.54));
    expect(nodeColor("grey", 0.5)).not.toBe(nodeColor("yellow", 0.5));
  });

  it("keeps green greenish and red reddish at any mastery", () => {
    for (const mastery of [0.56, 0.7, 0.9, 1.0]) {
      const [r, g, b] = channels(nodeColor("green", mastery));
      expect(g).toBeGreaterThan(r);
      expect(g).toBeGreaterThan(b);
    }
    for (const mastery of [0.44, 0.3, 0.1, 0.0]) {
      const [r, g, b] = channels(nodeColor("red", mastery));
      expect(r).toBeGreaterThan(g);
      expect(r).toBeGreaterThan(b);
    }
  });

  it("scales intensity with mastery toward the extremes", () => {
    expect(bandIntensity("green", 1.0)).toBeCloseTo(1, 12);
    expect(bandIntensity("green", 0.55)).toBe(0);
    expect(bandIntensity("red", 0.0)).toBe(1);
    expect(bandIntensity("red", 0.45)).toBeCloseTo(0, 12);
    const deeper = channels(nodeColor("green", 1.0));
    const paler = channels(nodeColor("green", 0.6));
    expect(deeper[1] - deeper[0]).toBeGreaterThan(0);
    expect(paler[0] + paler[1] + paler[2]).toBeGreaterThan(deeper[0] + deeper[1] + deeper[2]);
  });

  it("uses the server band as the single source of truth", () => {
    // even if mastery looks green-ish, a red band renders red
    const [r, g] = channels(nodeColor("red", 0.9));
    expect(r).toBeGreaterThan(g);
  });

  it("maps every node of the recorded views to its band color family", () => {
    const recording = loadRecording();
    const views = recording.exchanges
      .filter((e) => e.method === "GET" && /\/view(\?|$)/.test(e.path))
      .map((e) => e.response as GraphView);
    expect(views.length).toBeGreaterThan(1);
    const seen = new Set<Band>();
    for (const view of views) {
      for (const node of view.nodes) {
        seen.add(node.band);
        const [r, g, b] = channels(nodeColor(node.band, node.mastery));
        if (node.band === "green") expect(g).toBeGreaterThan(Math.max(r, b));
        if (node.band === "red") expect(r).toBeGreaterThan(Math.max(g, b));
        if (node.band === "grey") expect(Math.max(r, g, b) - Math.min(r, g, b)).toBe(0);
        if (node.band === "yellow") expect(b).toBeLessThan(Math.min(r, g));
      }
    }
    expect(seen).toContain("green");
    expect(seen).toContain("red");
    expect(seen).toContain("grey");
  });
});
