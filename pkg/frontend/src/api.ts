// Thin typed client for the triagekit HTTP API. All model math happens
// server-side; this module only moves JSON.

import type { ModelInfo, ModelManifest, PredictResponse, ServiceErrorBody } from "./types.js";

export type FetchLike = typeof fetch;

export class ServiceUnreachableError extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${cause instanceof Error ? cause.message : String(cause)}`);
    this.name = "ServiceUnreachableError";
  }
}

export class ValidationError extends Error {
  readonly messages: string[];
  constructor(messages: string[]) {
    super(messages.join("; "));
    this.name = "ValidationError";
    this.messages = messages;
  }
}

export class ServerError extends Error {
  readonly status: number;
  constructor(status: number, text: string) {
    super(`service error ${status}: ${text}`);
    this.name = "ServerError";
    this.status = status;
  }
}

function detailMessages(body: ServiceErrorBody | null): string[] {
  if (!body) return ["invalid request"];
  if (Array.isArray(body.detail)) return body.detail.map(String);
  return [String(body.detail)];
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    } catch (cause) {
      throw new ServiceUnreachableError(cause);
    }
    return response;
  }

  async listModels(): Promise<ModelInfo[]> {
    const response = await this.request("/models");
    if (!response.ok) throw new ServerError(response.status, await response.text());
    const body = (await response.json()) as { models: ModelInfo[] };
    return body.models;
  }

  async manifest(modelId: string): Promise<ModelManifest> {
    const response = await this.request(`/models/${encodeURIComponent(modelId)}/manifest`);
    if (!response.ok) throw new ServerError(response.status, await response.text());
    return (await response.json()) as ModelManifest;
  }

  async predict(modelId: string, features: Record<string, number>): Promise<PredictResponse> {
    const response = await this.request("/predict?explain=true", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ model: modelId, features }),
    });
    if (response.status === 422 || response.status === 400 || response.status === 404) {
      let body: ServiceErrorBody | null = null;
      try {
        body = (await response.json()) as ServiceErrorBody;
      } catch {
        body = null;
      }
      throw new ValidationError(detailMessages(body));
    }
    if (!response.ok) throw new ServerError(response.status, await response.text());
    return (await response.json()) as PredictResponse;
  }
}
