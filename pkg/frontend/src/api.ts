// Thin typed client over the JSON API. 401 surfaces as SessionExpired so
// the shell can drop back to the auth screen.

import type { ActionSet, Preferences } from "./adaptation.js";

export class ApiError extends Error {
  constructor(public readonly status: number, message: string) {
    super(message);
  }
}

export class SessionExpired extends ApiError {
  constructor() {
    super(401, "session expired");
  }
}

export interface QuestionPayload {
  id: string;
  level: number;
  operator: string;
  left: number;
  right: number;
  text: string;
}

export interface NextResponse {
  question: QuestionPayload;
  mode: string;
  deadline_ms: number;
}

export interface AnswerResponse {
  outcome: "correct" | "incorrect" | "timeout";
  correct_answer: number;
  mode: string;
  unit?: { unit_index: number; answered: number; correct: number };
  unit_complete?: boolean;
  unit_accuracy?: number;
  level_up_eligible?: boolean;
  adaptation?: ActionSet;
  review_queue_size: number;
}

export interface AdaptationResponse {
  actions: ActionSet;
  preferences: Preferences;
}

export interface ProgressResponse {
  username: string;
  current_level: number;
  first_time: boolean;
  last_unit_accuracy: number;
  levels: {
    level: number;
    complete: boolean;
    total_correct: number;
    units: { unit_index: number; accuracy: number; complete: boolean }[];
  }[];
  accuracy_history: number[];
  review_queue_size: number;
}

export class ApiClient {
  token: string | null = null;

  constructor(private readonly base: string = "") {}

  private async request(method: string, path: string, body?: unknown): Promise<Response> {
    const headers: Record<string, string> = {};
    if (body !== undefined) {
      headers["content-type"] = "application/json";
    }
    if (this.token) {
      headers["authorization"] = `Bearer ${this.token}`;
    }
    const response = await fetch(`${this.base}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.status === 401) {
      throw new SessionExpired();
    }
    if (!response.ok && response.status !== 204) {
      let detail = response.statusText;
      try {
        detail = (await response.json()).detail ?? detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  async register(username: string, password: string, age: number): Promise<{ level: number }> {
    const response = await this.request("POST", "/api/register", { username, password, age });
    return response.json();
  }

  async login(username: string, password: string): Promise<void> {
    const response = await this.request("POST", "/api/login", { username, password });
    this.token = (await response.json()).token;
  }

  async adaptation(orientation: "portrait" | "landscape"): Promise<AdaptationResponse> {
    const response = await this.request("GET", `/api/adaptation?orientation=${orientation}`);
    return response.json();
  }

  async next(mode: "standard" | "review"): Promise<NextResponse | null> {
    const response = await this.request("GET", `/api/game/next?mode=${mode}`);
    if (response.status === 204) {
      return null;
    }
    return response.json();
  }

  async answer(questionId: string, answer: number | null, elapsedMs: number): Promise<AnswerResponse> {
    const response = await this.request("POST", "/api/game/answer", {
      question_id: questionId,
      answer,
      elapsed_ms: Math.round(elapsedMs),
    });
    return response.json();
  }

  async levelChoice(accept: boolean): Promise<{ level: number }> {
    const response = await this.request("POST", "/api/level/choice", { accept });
    return response.json();
  }

  async saveSettings(preferences: Preferences): Promise<void> {
    await this.request("POST", "/api/settings", preferences);
  }

  async progress(): Promise<ProgressResponse> {
    const response = await this.request("GET", "/api/progress");
    return response.json();
  }
}
