/** Lasso selection geometry: free-form polygon containment. */

export type Point = [number, number];

/** Ray-casting point-in-polygon; boundary points count as inside. */
export function pointInPolygon(p: Point, polygon: Point[]): boolean {
  if (polygon.length < 3) return false;
  const [px, py] = p;
  let inside = false;
  for (let i = 0, j = polygon.length - 1; i < polygon.length; j = i++) {
    const [xi, yi] = polygon[i];
    const [xj, yj] = polygon[j];
    // on-edge check keeps boundary points selected
    const cross = (px - xi) * (yj - yi) - (py - yi) * (xj - xi);
    const within =
      Math.min(xi, xj) - 1e-9 <= px && px <= Math.max(xi, xj) + 1e-9 &&
      Math.min(yi, yj) - 1e-9 <= py && py <= Math.max(yi, yj) + 1e-9;
    if (Math.abs(cross) < 1e-9 && within) return true;
    if (yi > py !== yj > py && px < ((xj - xi) * (py - yi)) / (yj - yi) + xi) {
      inside = !inside;
    }
  }
  return inside;
}

/** Ids of points captured by a lasso polygon (screen coordinates). */
export function lassoSelect<T extends { id: string }>(
  points: Array<T & { sx: number; sy: number }>,
  polygon: Point[],
): string[] {
  return points.filter((p) => pointInPolygon([p.sx, p.sy], polygon)).map((p) => p.id);
}
