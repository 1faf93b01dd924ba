import type { TaskName } from "./types.js";
import { TASKS } from "./types.js";

/** Analyst selections driving the views. The store is last-write-wins and
 * holds no analysis results, only what the user picked. */
export interface ViewState {
  kind: string | null;
  severity: number | null;
  task: TaskName | null;
  lasso: Set<string>;
  hovered: string | null;
}

export type Listener = (state: ViewState) => void;

export class StateStore {
  private state: ViewState = { kind: null, severity: null, task: null, lasso: new Set(), hovered: null };
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  /** Corruption key for the current (kind, severity), or null. */
  selectedKey(): string | null {
    const { kind, severity } = this.state;
    if (kind == null || severity == null) return null;
    return severity === 0 ? "clean" : `${kind}_${severity}`;
  }

  subscribe(fn: Listener): void {
    this.listeners.push(fn);
  }

  update(patch: Partial<ViewState>): void {
    if (patch.severity != null && (patch.severity < 0 || patch.severity > 5)) {
      throw new Error(`severity out of range: ${patch.severity}`);
    }
    if (patch.task != null && !TASKS.includes(patch.task)) {
      throw new Error(`unknown task: ${patch.task}`);
    }
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  setLasso(ids: Iterable<string>): void {
    this.update({ lasso: new Set(ids) });
  }

  clearLasso(): void {
    this.update({ lasso: new Set() });
  }
}
