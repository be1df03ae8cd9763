// Typed client for the /v1 API. Field names mirror the service schemas.

export interface Citation {
  paper_id: string;
  title: string;
  url: string;
  abstract: string;
}

export interface AskResponse {
  answer_id: string;
  question: string;
  domain: string;
  answer_text: string;
  citations: Citation[];
  insufficient_evidence: boolean;
  notes: string[];
}

export interface AnswerSummary {
  answer_id: string;
  question: string;
  domain: string;
  insufficient_evidence: boolean;
}

export interface Scores {
  comprehensiveness: number;
  trust: number;
  utility: number;
  cite: number[];
}

export interface AnnotationResult {
  answer_id: string;
  annotator_id: string;
  scores: Scores;
  replaces_prior: boolean;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`API error ${status}: ${detail}`);
  }
}

const DEFAULT_BASE = "http://127.0.0.1:8000";

export function apiBase(): string {
  const stored =
    typeof localStorage !== "undefined" ? localStorage.getItem("api_base") : null;
  return (stored ?? DEFAULT_BASE).replace(/\/$/, "");
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ScholarQAClient {
  constructor(
    private readonly base: string = apiBase(),
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.base}/v1${path}`, init);
    } catch (err) {
      throw new ApiError(0, err instanceof Error ? err.message : "network failure");
    }
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail ?? body);
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  ask(question: string, domain?: string): Promise<AskResponse> {
    return this.request<AskResponse>("/ask", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(domain ? { question, domain } : { question }),
    });
  }

  listAnswers(): Promise<AnswerSummary[]> {
    return this.request<AnswerSummary[]>("/answers");
  }

  getAnswer(answerId: string): Promise<AskResponse> {
    return this.request<AskResponse>(`/answers/${encodeURIComponent(answerId)}`);
  }

  postAnnotation(
    answerId: string,
    annotatorId: string,
    scores: Scores,
  ): Promise<AnnotationResult> {
    return this.request<AnnotationResult>("/annotations", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        answer_id: answerId,
        annotator_id: annotatorId,
        scores,
      }),
    });
  }

  health(): Promise<{ status: string }> {
    return this.request<{ status: string }>("/healthz");
  }
}
