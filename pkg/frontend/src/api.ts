// Typed client for the server's /api/v1 endpoints.

import type { CatalogDoc, ClientConfig, StoryDoc } from "./types";

export class ApiError extends Error {
  constructor(readonly status: number, readonly code: string, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchImpl = typeof fetch;

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let code = "bad_request";
  let message = `HTTP ${response.status}`;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the defaults
  }
  throw new ApiError(response.status, code, message);
}

export class Api {
  constructor(private readonly fetchImpl: FetchImpl = fetch) {}

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(path);
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  fetchCatalog(): Promise<CatalogDoc> {
    return this.getJson<CatalogDoc>("/api/v1/catalog");
  }

  fetchConfig(): Promise<ClientConfig> {
    return this.getJson<ClientConfig>("/api/v1/config");
  }

  listStories(): Promise<StoryDoc[]> {
    return this.getJson<StoryDoc[]>("/api/v1/stories");
  }

  async saveStory(story: StoryDoc): Promise<StoryDoc> {
    const response = await this.fetchImpl("/api/v1/stories", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(story),
    });
    if (response.status === 409) {
      return story; // already on the server: fine for PDF export
    }
    await raiseForStatus(response);
    return (await response.json()) as StoryDoc;
  }

  async deleteStory(id: string): Promise<void> {
    const response = await this.fetchImpl(`/api/v1/stories/${id}`, { method: "DELETE" });
    if (response.status === 404) return;
    await raiseForStatus(response);
  }

  pdfUrl(id: string): string {
    return `/api/v1/stories/${id}/pdf`;
  }
}
