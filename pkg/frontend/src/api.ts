import type {
  CorruptionsPayload,
  CurvesPayload,
  ExportResponse,
  InstancePayload,
  ProjectionPayload,
  TasksPayload,
} from "./types.js";

/** Thin typed client over the analysis API. */
export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async get<T>(path: string, params: Record<string, string> = {}): Promise<T> {
    const qs = new URLSearchParams(params).toString();
    const res = await fetch(`${this.baseUrl}${path}${qs ? "?" + qs : ""}`);
    if (!res.ok) {
      const body = await res.text();
      throw new Error(`GET ${path} failed (${res.status}): ${body}`);
    }
    return (await res.json()) as T;
  }

  corruptions(): Promise<CorruptionsPayload> {
    return this.get("/corruptions");
  }

  curves(kind: string): Promise<CurvesPayload> {
    return this.get("/curves", { kind });
  }

  tasks(key: string): Promise<TasksPayload> {
    return this.get("/tasks", { key });
  }

  projection(key: string, task: string): Promise<ProjectionPayload> {
    return this.get("/projection", { key, task });
  }

  instance(id: string, key: string): Promise<InstancePayload> {
    return this.get("/instance", { id, key });
  }

  async exportSelection(ids: string[], key: string, task: string): Promise<ExportResponse> {
    const res = await fetch(`${this.baseUrl}/selection/export`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ ids, key, task }),
    });
    if (!res.ok) {
      const body = await res.text();
      throw new Error(`export failed (${res.status}): ${body}`);
    }
    return (await res.json()) as ExportResponse;
  }
}
