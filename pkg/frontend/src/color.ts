import type { Band } from "./schema";

// The band always comes from the server; the client only turns it into a
// pixel color, scaling intensity with the server-sent mastery value.

const GREY = { r: 158, g: 158, b: 158 };
const YELLOW = { r: 233, g: 196, b: 54 };
const GREEN_PALE = { r: 200, g: 230, b: 193 };
const GREEN_FULL = { r: 34, g: 139, b: 58 };
const RED_PALE = { r: 243, g: 205, b: 201 };
const RED_FULL = { r: 186, g: 32, b: 26 };

function mix(a: { r: number; g: number; b: number }, b: { r: number; g: number; b: number }, t: number) {
  const clamp = (x: number) => Math.max(0, Math.min(1, x));
  const k = clamp(t);
  return {
    r: Math.round(a.r + (b.r - a.r) * k),
    g: Math.round(a.g + (b.g - a.g) * k),
    b: Math.round(a.b + (b.b - a.b) * k),
  };
}

function css(c: { r: number; g: number; b: number }): string {
  return `rgb(${c.r}, ${c.g}, ${c.b})`;
}

/** Intensity within a band: 0 at the yellow boundary, 1 at the extreme. */
export function bandIntensity(band: Band, mastery: number): number {
  if (band === "green") {
    return Math.max(0, Math.min(1, (mastery - 0.55) / 0.45));
  }
  if (band === "red") {
    return Math.max(0, Math.min(1, (0.45 - mastery) / 0.45));
  }
  return 0;
}

export function nodeColor(band: Band, mastery: number): string {
  switch (band) {
    case "grey":
      return css(GREY);
    case "yellow":
      return css(YELLOW);
    case "green":
      return css(mix(GREEN_PALE, GREEN_FULL, bandIntensity(band, mastery)));
    case "red":
      return css(mix(RED_PALE, RED_FULL, bandIntensity(band, mastery)));
  }
}
