/** SVG string builders. Rendering to strings keeps every chart a pure,
 * node-testable function of its payload; the browser entry point mounts the
 * strings with innerHTML and wires events by delegation. */

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export function attrs(a: Record<string, string | number | undefined>): string {
  return Object.entries(a)
    .filter(([, v]) => v !== undefined)
    .map(([k, v]) => `${k}="${typeof v === "number" ? +v.toFixed(3) : esc(String(v))}"`)
    .join(" ");
}

export function el(tag: string, a: Record<string, string | number | undefined>, children = ""): string {
  const at = attrs(a);
  return children === "" ? `<${tag} ${at}/>` : `<${tag} ${at}>${children}</${tag}>`;
}

export function svg(width: number, height: number, children: string, cls = ""): string {
  return el(
    "svg",
    { width, height, viewBox: `0 0 ${width} ${height}`, xmlns: "http://www.w3.org/2000/svg", class: cls || undefined },
    children,
  );
}

export function polylinePath(points: Array<[number, number]>): string {
  return points.map(([x, y], i) => `${i === 0 ? "M" : "L"}${+x.toFixed(2)},${+y.toFixed(2)}`).join("");
}

/** Categorical cluster palette; outliers (-1) render neutral gray. */
const PALETTE = [
  "#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#b07aa1",
  "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac",
];

export function clusterColor(label: number): string {
  if (label < 0) return "#999999";
  return PALETTE[label % PALETTE.length];
}
