/** Thin typed client for the labeling service; the UI's only backend. */

import type {
  FeaturesResponse,
  LabelItem,
  QueriesResponse,
  SessionView,
} from "./types.js";

export type FetchFn = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseDetail(res: { json(): Promise<unknown> }): Promise<string> {
  try {
    const body = (await res.json()) as { detail?: unknown };
    return typeof body.detail === "string" ? body.detail : JSON.stringify(body);
  } catch {
    return "unreadable error body";
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchFn = (url, init) =>
      globalThis.fetch(url, init),
  ) {}

  private async get<T>(path: string): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path);
    if (res.status !== 200) throw new ApiError(res.status, await parseDetail(res));
    return (await res.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const res = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (res.status !== 200) throw new ApiError(res.status, await parseDetail(res));
    return (await res.json()) as T;
  }

  getSession(): Promise<SessionView> {
    return this.get("/api/session");
  }

  getQueries(): Promise<QueriesResponse> {
    return this.get("/api/queries");
  }

  getFeatures(): Promise<FeaturesResponse> {
    return this.get("/api/features");
  }

  postLabels(labels: LabelItem[], token: string): Promise<SessionView> {
    return this.post("/api/labels", { labels, token });
  }
}
