/** Thin typed client for the review session API.
 *
 * Every value the UI shows comes through here; the client never computes
 * similarity or defect logic, it only moves JSON.
 */

import type { DecisionsDoc, DefectsDoc, ModelsDoc, RelationsDoc, Verdict } from "./types.js";

export interface HttpResponse {
  ok: boolean;
  status: number;
  text(): Promise<string>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<HttpResponse>;

/** A response the server produced deliberately (4xx/5xx with a JSON body). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

function defaultFetch(url: string, init?: Parameters<FetchLike>[1]): Promise<HttpResponse> {
  return globalThis.fetch(url, init);
}

export class ReviewApi {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = defaultFetch,
  ) {}

  private async request(path: string, init?: Parameters<FetchLike>[1]): Promise<string> {
    const response = await this.fetchImpl(this.base + path, init);
    const body = await response.text();
    if (!response.ok) {
      let message = `${response.status} on ${path}`;
      try {
        const parsed = JSON.parse(body) as { error?: string };
        if (parsed.error) message = parsed.error;
      } catch {
        // Non-JSON error body; keep the generic message.
      }
      throw new ApiError(response.status, message);
    }
    return body;
  }

  private async getJson<T>(path: string): Promise<T> {
    return JSON.parse(await this.request(path)) as T;
  }

  models(): Promise<ModelsDoc> {
    return this.getJson("/api/models");
  }

  relations(): Promise<RelationsDoc> {
    return this.getJson("/api/relations");
  }

  defects(): Promise<DefectsDoc> {
    return this.getJson("/api/defects");
  }

  /** The defect report exactly as served, for byte-level comparisons. */
  defectsRaw(): Promise<string> {
    return this.request("/api/defects");
  }

  decisions(): Promise<DecisionsDoc> {
    return this.getJson("/api/decisions");
  }

  /** Records a verdict; resolves to the raw updated defect report body. */
  async decideRaw(relationId: string, verdict: Verdict, note: string): Promise<string> {
    return this.request("/api/decisions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ relation_id: relationId, verdict, note }),
    });
  }
}
