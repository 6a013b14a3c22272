import type {
  AnswerResult,
  BookStatus,
  GraphView,
  Mode,
  NextResponse,
  SessionInfo,
  WarmstartChecklist,
  WarmstartSummary,
} from "./schema";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

/** Thin typed client over the service API. GETs are idempotent and retried. */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
    private readonly retries: number = 2,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const attempts = method === "GET" ? this.retries + 1 : 1;
    let lastError: unknown;
    for (let attempt = 0; attempt < attempts; attempt++) {
      try {
        const response = await this.fetchFn(this.base + path, init);
        if (!response.ok) {
          throw new ApiError(response.status, `${method} ${path} -> ${response.status}`);
        }
        return (await response.json()) as T;
      } catch (err) {
        lastError = err;
        if (err instanceof ApiError) {
          throw err; // HTTP errors are not transient
        }
      }
    }
    throw lastError;
  }

  bookStatus(bookId: string): Promise<BookStatus> {
    return this.request("GET", `/books/${bookId}/status`);
  }

  learnerView(learnerId: string, bookId: string, expand?: string): Promise<GraphView> {
    const query = expand ? `?expand=${encodeURIComponent(expand)}` : "";
    return this.request("GET", `/learners/${learnerId}/books/${bookId}/view${query}`);
  }

  warmstartChecklist(learnerId: string, bookId: string, size?: number): Promise<WarmstartChecklist> {
    return this.request("POST", `/learners/${learnerId}/books/${bookId}/warmstart`,
                        size ? { size } : {});
  }

  submitWarmstart(
    learnerId: string,
    bookId: string,
    answers: { family: string; known: boolean }[],
  ): Promise<WarmstartSummary> {
    return this.request("POST", `/learners/${learnerId}/books/${bookId}/warmstart/answers`,
                        { answers });
  }

  startSession(learnerId: string, bookId: string, mode: Mode): Promise<SessionInfo> {
    return this.request("POST", `/learners/${learnerId}/books/${bookId}/sessions`, { mode });
  }

  nextActivity(sessionId: string): Promise<NextResponse> {
    return this.request("GET", `/sessions/${sessionId}/next`);
  }

  submitAnswer(sessionId: string, activityId: string, chosen: string): Promise<AnswerResult> {
    return this.request("POST", `/sessions/${sessionId}/answers`,
                        { activity_id: activityId, chosen });
  }
}
