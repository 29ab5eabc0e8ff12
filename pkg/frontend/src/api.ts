// Thin typed client over the annotation service HTTP API.

import type {
  AnnotationRecord,
  NextTaskResponse,
  SessionInfo,
  SubmitResult,
  TallyResponse,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export class AnnotationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  mediaUrl(path: string): string {
    return this.baseUrl + path;
  }

  async createSession(annotatorId: string, method = 'gradcam'): Promise<SessionInfo> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ annotator_id: annotatorId, method }),
    });
    if (!response.ok) throw new ApiError(await errorDetail(response), response.status);
    return (await response.json()) as SessionInfo;
  }

  async nextTask(sessionId: string): Promise<NextTaskResponse> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/next`);
    if (!response.ok) throw new ApiError(await errorDetail(response), response.status);
    return (await response.json()) as NextTaskResponse;
  }

  /**
   * Submit labels for one task. Conflicts (task already done) and validation
   * failures are results, not exceptions: the caller decides how to advance.
   * Network failures reject, leaving the caller's state untouched.
   */
  async submit(
    sessionId: string,
    taskId: string,
    labels: string[],
    empty: boolean,
  ): Promise<SubmitResult> {
    const response = await this.fetchImpl(`${this.baseUrl}/sessions/${sessionId}/tasks/${taskId}`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ labels, empty }),
    });
    if (response.status === 409) return { status: 'conflict' };
    if (response.status === 422) return { status: 'invalid', detail: await errorDetail(response) };
    if (!response.ok) throw new ApiError(await errorDetail(response), response.status);
    return { status: 'submitted', record: (await response.json()) as AnnotationRecord };
  }

  async tally(filters: { attribute?: string; polarity?: string; model?: string } = {}): Promise<TallyResponse> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value) params.set(key, value);
    }
    const query = params.toString();
    const response = await this.fetchImpl(`${this.baseUrl}/tally${query ? `?${query}` : ''}`);
    if (!response.ok) throw new ApiError(await errorDetail(response), response.status);
    return (await response.json()) as TallyResponse;
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? `HTTP ${response.status}`;
  } catch {
    return `HTTP ${response.status}`;
  }
}
