/** Thin typed client for the review server; all methods reject with
 * ApiError carrying the server's machine-readable category. */

import type {
  DecisionRequest,
  DecisionResult,
  QueuePage,
  ReviewItem,
} from "./types.js";

export class ApiError extends Error {
  readonly category: string;
  readonly status: number;

  constructor(category: string, message: string, status: number) {
    super(message);
    this.category = category;
    this.status = status;
  }
}

export interface ReviewApi {
  fetchQueue(offset: number, limit: number, signal?: AbortSignal): Promise<QueuePage>;
  fetchRecord(id: string): Promise<ReviewItem>;
  postDecision(decision: DecisionRequest): Promise<DecisionResult>;
  audioUrl(id: string): string;
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let category = "http_error";
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body && typeof body.category === "string") {
        category = body.category;
        message = body.message ?? message;
      }
    } catch {
      // non-JSON error body; keep the generic category
    }
    throw new ApiError(category, message, response.status);
  }
  return (await response.json()) as T;
}

export class HttpReviewApi implements ReviewApi {
  constructor(private readonly base: string = "") {}

  async fetchQueue(
    offset: number,
    limit: number,
    signal?: AbortSignal,
  ): Promise<QueuePage> {
    const response = await fetch(
      `${this.base}/queue?offset=${offset}&limit=${limit}`,
      { signal },
    );
    return asJson<QueuePage>(response);
  }

  async fetchRecord(id: string): Promise<ReviewItem> {
    const response = await fetch(`${this.base}/records/${encodeURIComponent(id)}`);
    return asJson<ReviewItem>(response);
  }

  async postDecision(decision: DecisionRequest): Promise<DecisionResult> {
    const response = await fetch(`${this.base}/decisions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(decision),
    });
    return asJson<DecisionResult>(response);
  }

  audioUrl(id: string): string {
    return `${this.base}/audio/${encodeURIComponent(id)}`;
  }
}
