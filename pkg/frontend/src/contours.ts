/** Marching squares over the server's 64x64 density grids.
 *
 * The server computes densities; this module only extracts iso-lines and
 * joins them into closed loops for filled contour rendering. Density levels
 * are encoded by fill lightness and stroke width downstream.
 */

export type Segment = [number, number, number, number]; // x1 y1 x2 y2 in grid coords
export type Loop = Array<[number, number]>;

function interp(a: number, b: number, level: number): number {
  return a === b ? 0.5 : (level - a) / (b - a);
}

/** Iso-line segments of one level, in fractional grid coordinates. */
export function marchingSquares(grid: number[][], level: number): Segment[] {
  const rows = grid.length;
  const cols = grid[0]?.length ?? 0;
  const segs: Segment[] = [];
  for (let y = 0; y < rows - 1; y++) {
    for (let x = 0; x < cols - 1; x++) {
      const tl = grid[y][x];
      const tr = grid[y][x + 1];
      const br = grid[y + 1][x + 1];
      const bl = grid[y + 1][x];
      let idx = 0;
      if (tl >= level) idx |= 8;
      if (tr >= level) idx |= 4;
      if (br >= level) idx |= 2;
      if (bl >= level) idx |= 1;
      if (idx === 0 || idx === 15) continue;

      const top: [number, number] = [x + interp(tl, tr, level), y];
      const right: [number, number] = [x + 1, y + interp(tr, br, level)];
      const bottom: [number, number] = [x + interp(bl, br, level), y + 1];
      const left: [number, number] = [x, y + interp(tl, bl, level)];

      const emit = (a: [number, number], b: [number, number]) =>
        segs.push([a[0], a[1], b[0], b[1]]);

      switch (idx) {
        case 1: emit(left, bottom); break;
        case 2: emit(bottom, right); break;
        case 3: emit(left, right); break;
        case 4: emit(right, top); break;
        case 5: emit(left, top); emit(right, bottom); break;
        case 6: emit(bottom, top); break;
        case 7: emit(left, top); break;
        case 8: emit(top, left); break;
        case 9: emit(top, bottom); break;
        case 10: emit(top, right); emit(bottom, left); break;
        case 11: emit(top, right); break;
        case 12: emit(right, left); break;
        case 13: emit(right, bottom); break;
        case 14: emit(bottom, left); break;
      }
    }
  }
  return segs;
}

const KEY_SCALE = 1e6;

function key(x: number, y: number): string {
  return `${Math.round(x * KEY_SCALE)}:${Math.round(y * KEY_SCALE)}`;
}

/** Join segments into loops (closed where the iso-line does not hit the grid
 * border; open chains are returned as-is). */
export function joinLoops(segs: Segment[]): Loop[] {
  const byStart = new Map<string, Segment[]>();
  for (const s of segs) {
    const k = key(s[0], s[1]);
    const bucket = byStart.get(k);
    if (bucket) bucket.push(s);
    else byStart.set(k, [s]);
  }
  const used = new Set<Segment>();
  const loops: Loop[] = [];
  for (const seed of segs) {
    if (used.has(seed)) continue;
    used.add(seed);
    const loop: Loop = [
      [seed[0], seed[1]],
      [seed[2], seed[3]],
    ];
    for (;;) {
      const tail = loop[loop.length - 1];
      const candidates = byStart.get(key(tail[0], tail[1])) ?? [];
      const next = candidates.find((s) => !used.has(s));
      if (!next) break;
      used.add(next);
      loop.push([next[2], next[3]]);
      if (key(next[2], next[3]) === key(loop[0][0], loop[0][1])) break;
    }
    loops.push(loop);
  }
  return loops;
}

export function isClosed(loop: Loop): boolean {
  const [x0, y0] = loop[0];
  const [x1, y1] = loop[loop.length - 1];
  return key(x0, y0) === key(x1, y1) && loop.length > 3;
}

export interface ContourSet {
  level: number;
  /** 0..1 rank of the level, low to high; drives lightness and stroke width */
  strength: number;
  loops: Loop[];
}

/** Contours at evenly spaced fractions of the grid maximum. */
export function contourLevels(grid: number[][], fractions: number[] = [0.2, 0.45, 0.7]): ContourSet[] {
  let max = 0;
  for (const row of grid) for (const v of row) max = Math.max(max, v);
  if (max <= 0) return [];
  return fractions.map((f, i) => ({
    level: f * max,
    strength: fractions.length === 1 ? 1 : i / (fractions.length - 1),
    loops: joinLoops(marchingSquares(grid, f * max)),
  }));
}
