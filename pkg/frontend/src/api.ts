/** Typed client for the analysis service.
 *
 * The fetch implementation is injectable so tests can record requests and
 * script responses without a server.
 */

import type { AnalysisResult, FeedbackRequest } from "./types.js";

/** The slice of the fetch contract the client relies on. */
export interface JsonResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<JsonResponse>;

/** A non-2xx reply, carrying the service's machine-readable code. */
export class ApiError extends Error {
  constructor(
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface SchemeClass {
  code: string;
  title: string;
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  async analyze(text: string, docId?: string): Promise<AnalysisResult> {
    const body = docId === undefined ? { text } : { text, doc_id: docId };
    return (await this.post("/v1/analyze", body)) as AnalysisResult;
  }

  async feedback(record: FeedbackRequest): Promise<void> {
    await this.post("/v1/feedback", record);
  }

  async health(): Promise<{ status: string; pipeline_version: string }> {
    return (await this.get("/v1/health")) as { status: string; pipeline_version: string };
  }

  async scheme(): Promise<SchemeClass[]> {
    const payload = (await this.get("/v1/scheme")) as { classes: SchemeClass[] };
    return payload.classes;
  }

  private async get(path: string): Promise<unknown> {
    return this.unwrap(await this.fetchImpl(this.baseUrl + path));
  }

  private async post(path: string, body: unknown): Promise<unknown> {
    return this.unwrap(
      await this.fetchImpl(this.baseUrl + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
      }),
    );
  }

  private async unwrap(response: JsonResponse): Promise<unknown> {
    const payload = (await response.json()) as { error?: string; code?: string };
    if (!response.ok) {
      throw new ApiError(payload.code ?? "internal", payload.error ?? `HTTP ${response.status}`);
    }
    return payload;
  }
}
