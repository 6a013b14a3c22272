import { hashString, mulberry32 } from "./rng";

export interface LayoutPoint {
  x: number;
  y: number;
}

export interface LayoutOptions {
  ticks?: number;
  springLength?: number;
  springStrength?: number;
  repulsion?: number;
  gravity?: number;
  cellSize?: number;
}

interface Body extends LayoutPoint {
  vx: number;
  vy: number;
}

/**
 * Deterministic force layout: seeded phyllotaxis start, then spring +
 * grid-local repulsion ticks. Repulsion only considers nearby grid cells,
 * keeping each tick roughly linear in node count so book-scale graphs
 * (1.5k nodes) lay out in well under a second.
 */
export function computeLayout(
  nodeIds: readonly string[],
  edges: readonly { a: string; b: string; weight: number }[],
  seedKey: string,
  options: LayoutOptions = {},
): Map<string, LayoutPoint> {
  const ticks = options.ticks ?? 150;
  const springLength = options.springLength ?? 46;
  const springStrength = options.springStrength ?? 0.025;
  const repulsion = options.repulsion ?? 900;
  const gravity = options.gravity ?? 0.004;
  const cellSize = options.cellSize ?? 60;

  const rng = mulberry32(hashString(seedKey));
  const bodies: Body[] = [];
  const indexOf = new Map<string, number>();
  const golden = Math.PI * (3 - Math.sqrt(5));
  for (let i = 0; i < nodeIds.length; i++) {
    indexOf.set(nodeIds[i], i);
    const radius = 14 * Math.sqrt(i + 0.5) + rng() * 4;
    const angle = i * golden + rng() * 0.1;
    bodies.push({ x: radius * Math.cos(angle), y: radius * Math.sin(angle), vx: 0, vy: 0 });
  }
  const springs = edges
    .filter((e) => indexOf.has(e.a) && indexOf.has(e.b))
    .map((e) => ({ i: indexOf.get(e.a)!, j: indexOf.get(e.b)!, w: e.weight }));

  const grid = new Map<number, number[]>();
  const cellKey = (cx: number, cy: number) => cx * 73856093 + cy * 19349663;

  for (let tick = 0; tick < ticks; tick++) {
    const cooling = 1 - tick / ticks;

    grid.clear();
    for (let i = 0; i < bodies.length; i++) {
      const key = cellKey(Math.floor(bodies[i].x / cellSize), Math.floor(bodies[i].y / cellSize));
      const bucket = grid.get(key);
      if (bucket) {
        bucket.push(i);
      } else {
        grid.set(key, [i]);
      }
    }

    for (let i = 0; i < bodies.length; i++) {
      const body = bodies[i];
      const cx = Math.floor(body.x / cellSize);
      const cy = Math.floor(body.y / cellSize);
      for (let dx = -1; dx <= 1; dx++) {
        for (let dy = -1; dy <= 1; dy++) {
          const bucket = grid.get(cellKey(cx + dx, cy + dy));
          if (!bucket) continue;
          for (const j of bucket) {
            if (j <= i) continue;
            const other = bodies[j];
            let ox = body.x - other.x;
            let oy = body.y - other.y;
            let d2 = ox * ox + oy * oy;
            if (d2 < 0.01) {
              ox = (i - j) * 0.01;
              oy = 0.013;
              d2 = ox * ox + oy * oy;
            }
            const force = (repulsion / d2) * cooling;
            const d = Math.sqrt(d2);
            const fx = (ox / d) * force;
            const fy = (oy / d) * force;
            body.vx += fx;
            body.vy += fy;
            other.vx -= fx;
            other.vy -= fy;
          }
        }
      }
    }

    for (const spring of springs) {
      const a = bodies[spring.i];
      const b = bodies[spring.j];
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.sqrt(dx * dx + dy * dy) || 0.01;
      const stretch = (d - springLength / (0.5 + spring.w)) * springStrength * cooling;
      const fx = (dx / d) * stretch;
      const fy = (dy / d) * stretch;
      a.vx += fx;
      a.vy += fy;
      b.vx -= fx;
      b.vy -= fy;
    }

    for (const body of bodies) {
      body.vx -= body.x * gravity * cooling;
      body.vy -= body.y * gravity * cooling;
      body.x += Math.max(-30, Math.min(30, body.vx));
      body.y += Math.max(-30, Math.min(30, body.vy));
      body.vx *= 0.55;
      body.vy *= 0.55;
    }
  }

  const out = new Map<string, LayoutPoint>();
  for (let i = 0; i < nodeIds.length; i++) {
    out.set(nodeIds[i], { x: bodies[i].x, y: bodies[i].y });
  }
  return out;
}
