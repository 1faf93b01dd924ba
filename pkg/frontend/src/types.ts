/** Payload shapes of the analysis API. The dashboard never recomputes any
 * number it can fetch; these types mirror the server responses 1:1. */

export const METRIC_NAMES = ["bleu1", "bleu4", "meteor", "rouge_l", "cider", "spice"] as const;
export type MetricName = (typeof METRIC_NAMES)[number];

export const TASKS = ["object", "attribute", "relation", "color", "count", "size"] as const;
export type TaskName = (typeof TASKS)[number];

export interface CorruptionEntry {
  key: string;
  kind: string | null;
  severity: number;
  available: boolean;
}

export interface CorruptionsPayload {
  kinds: string[];
  severities: number[];
  entries: CorruptionEntry[];
}

export interface CurvesPayload {
  kind: string;
  status: "ok" | "not_computed";
  metrics?: Record<MetricName, number[]>;
  display_reference?: Record<string, number | boolean>;
  detail?: string;
}

export interface TaskSideValues {
  attempt_count: number;
  error_rate: number | null;
  shift_rate: number | null;
  sensitivity: number;
}

export interface DensitySeries {
  x: number[];
  density: number[];
  bandwidth: number;
}

export interface TaskRow {
  task: TaskName;
  corrupted: TaskSideValues;
  clean: TaskSideValues;
  densities: { err: DensitySeries | null; sf: DensitySeries | null; sen: DensitySeries | null };
}

export interface TasksPayload {
  key: string;
  status: "ok" | "not_computed";
  tasks?: TaskRow[];
  detail?: string;
}

export interface ProjectionPoint {
  id: string;
  x: number;
  y: number;
  label: number;
  error_rate: number | null;
  shift_rate: number | null;
  sensitivity: number | null;
}

export interface DensityGrid {
  grid: number[][];
  extent: [number, number, number, number];
  bandwidth: [number, number];
  count: number;
}

export interface ClusterInfo {
  label: number;
  centroid_label: string;
  density: DensityGrid;
}

export interface ProjectionPayload {
  key: string;
  task: TaskName;
  status: "ok" | "not_computed" | "empty";
  alpha?: number;
  points: ProjectionPoint[];
  clusters: ClusterInfo[];
  detail?: string;
}

export interface AxisElement {
  element: string;
  tuple: string[];
  categories: string[];
  matched: boolean;
  gt_frequency: number;
}

export interface GtCard {
  element: string;
  tuple: string[];
  frequency: number;
}

export interface InstancePayload {
  id: string;
  corrupted_key: string;
  image: { clean: string; corrupted: string };
  layers: { corrupted: AxisElement[]; gt_cards: GtCard[]; clean: AxisElement[] };
  task_metrics: Record<string, { attempted: number; error_rate: number | null; shift_rate: number | null; sensitivity: number | null }>;
  radar: { corrupted: Record<MetricName, number> | null; clean: Record<MetricName, number> | null };
  ground_truths: string[];
  captions: Record<string, string | null>;
}

export interface ExportResponse {
  path: string;
  count: number;
  header: Record<string, unknown>;
}
