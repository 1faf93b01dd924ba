/** Minimal linear scale helpers; axis scaling is the one computation the
 * dashboard performs client-side. */

export interface LinearScale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const fn = ((v: number) => (span === 0 ? (r0 + r1) / 2 : r0 + ((v - d0) / span) * (r1 - r0))) as LinearScale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

/** Upper bound for a metric axis: the series maximum, padded, never zero. */
export function axisMax(values: Array<number | null>): number {
  const finite = values.filter((v): v is number => v != null && Number.isFinite(v));
  const top = finite.length ? Math.max(...finite) : 0;
  return top <= 0 ? 1 : top * 1.05;
}

export function ticks(lo: number, hi: number, count: number): number[] {
  if (count < 2 || hi === lo) return [lo];
  const out: number[] = [];
  for (let i = 0; i < count; i++) out.push(lo + ((hi - lo) * i) / (count - 1));
  return out;
}

export function formatNumber(v: number | null, digits = 3): string {
  if (v == null || !Number.isFinite(v)) return "–";
  return v.toFixed(digits);
}

export function formatPercent(v: number | null): string {
  if (v == null || !Number.isFinite(v)) return "–";
  return (v * 100).toFixed(1) + "%";
}
